#pragma once

#include "hinforge/clustering.hpp"
#include "hinforge/config.hpp"
#include "hinforge/encoder.hpp"
#include "hinforge/hin.hpp"
#include "hinforge/metapath.hpp"
#include "hinforge/variational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hinforge {

struct LossReport {
    int stage = 0;
    int epoch = 0;
    double enc = 0.0;
    double c = 0.0;
    double recon = 0.0;
    std::vector<double> per_path;
    double total = 0.0;
};

struct ModelState {
    EncoderParams enc;
    Tensor g;
    std::vector<Tensor> w_disc;
    std::vector<std::string> schema_names;
    int stage_done = 0;
};

struct EvalReport {
    bool has_labels = false;
    int labeled = 0;
    double nmi_joint = 0.0;
    double nmi_kmeans = 0.0;
    double f1_micro = 0.0;
    double f1_macro = 0.0;
    std::vector<int> joint_labels;
    std::vector<int> kmeans_labels;
    std::vector<std::string> notes;
};

// Everything derived deterministically from (hin, config): schemas, fixed
// walk samples, the representative-averaging matrix, encoder constants.
struct TrainContext {
    const Hin* hin = nullptr;
    TrainConfig cfg;
    SeedStream seeds;
    EncoderInputs inputs;
    std::vector<MetaPathSchema> schemas;
    std::vector<std::vector<std::vector<int>>> walks;
    std::vector<std::vector<int>> samples_union;
    std::vector<std::vector<int>> zeta;
    Tensor rep;
    std::vector<RepSource> rep_tags;

    TrainContext() : seeds(0) {}
};

TrainContext build_context(const Hin& hin, const TrainConfig& cfg);
ModelState init_state(const TrainContext& ctx);

void stage1_pretrain(const TrainContext& ctx, ModelState& st, std::vector<LossReport>& losses);
void stage2_init_clusters(const TrainContext& ctx, ModelState& st,
                          std::vector<LossReport>& losses);
void stage3_joint(const TrainContext& ctx, ModelState& st, std::vector<LossReport>& losses);

EvalReport evaluate(const TrainContext& ctx, const ModelState& st);

// Mean discriminator scores over all walks of every schema: (positive mean,
// corrupted mean), with one fixed corruption draw.
std::pair<double, double> discriminator_separation(const TrainContext& ctx, const ModelState& st);

struct TrainResult {
    ModelState state;
    std::vector<LossReport> losses;
    EvalReport eval;
    double wall_seconds = 0.0;
};

TrainResult train_all(const Hin& hin, const TrainConfig& cfg);
// Runs the stages after st.stage_done; bit-identical to an uninterrupted run.
TrainResult resume_training(const Hin& hin, const TrainConfig& cfg, ModelState st);

void save_checkpoint(const ModelState& st, const TrainConfig& cfg, const std::string& path);
std::pair<ModelState, TrainConfig> load_checkpoint(const std::string& path);

std::string report_json(const Hin& hin, const TrainConfig& cfg, const TrainResult& result,
                        const std::string& ablation_json = "");
void write_losses_csv(const std::vector<LossReport>& losses,
                      const std::vector<std::string>& schema_names, const std::string& path);
void write_embeddings_csv(const Hin& hin, const Tensor& z, const std::string& path);
void write_clusters_csv(const Hin& hin, const EvalReport& eval, const std::string& path);
// Final mean embeddings for a trained state.
Tensor final_embeddings(const TrainContext& ctx, const ModelState& st);

}  // namespace hinforge
