#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hinforge {

struct TrainConfig {
    int dim = 128;
    int hidden = 0;  // 0 means 2*dim
    int k = 3;
    std::vector<std::string> metapaths;
    int per_node = 10;
    int j_negatives = 1;
    int r_samples = 1;
    double tau = 0.5;
    double lr = 1e-3;
    int epochs1 = 200;
    int epochs2 = 100;
    int epochs3 = 500;
    int contrastive_batch = 512;
    std::uint64_t seed = 7;
    std::string encoder = "gcn";
    bool use_contrastive = true;
    bool kmeans_eval = true;
    bool stage2_train_encoder = false;
    bool straight_through = false;
    std::string nmi_norm = "sqrt";  // or "arithmetic"
    double classifier_l2 = 1.0;
    double train_frac = 0.8;
    int kmeans_restarts = 10;
    int kmeans_iters = 100;

    int hidden_or_default() const { return hidden > 0 ? hidden : 2 * dim; }
    void validate() const;
};

TrainConfig load_config(const std::string& path);
// Overlays JSON text onto an existing config; unknown keys are rejected.
void apply_config_json(TrainConfig& cfg, const std::string& json_text, const std::string& origin);
std::string config_to_json(const TrainConfig& cfg);

}  // namespace hinforge
