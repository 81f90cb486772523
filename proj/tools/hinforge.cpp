// Command-line surface: synth, sample-paths, train, eval, export.
#include <CLI11.hpp>
#include <json.hpp>

#include "hinforge/errors.hpp"
#include "hinforge/hin.hpp"
#include "hinforge/metapath.hpp"
#include "hinforge/pipeline.hpp"
#include "hinforge/synth.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace hinforge;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

void write_matrix_csv(const Tensor& m, const std::string& row_label, const std::string& col_prefix,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << row_label;
    for (int j = 0; j < m.cols; ++j) out << ',' << col_prefix << j;
    out << '\n';
    char buf[40];
    for (int i = 0; i < m.rows; ++i) {
        out << i;
        for (int j = 0; j < m.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

ordered_json metrics_json(const EvalReport& ev) {
    ordered_json j;
    j["has_labels"] = ev.has_labels;
    j["labeled"] = ev.labeled;
    j["nmi_joint"] = ev.nmi_joint;
    j["nmi_kmeans"] = ev.nmi_kmeans;
    j["f1_micro"] = ev.f1_micro;
    j["f1_macro"] = ev.f1_macro;
    j["notes"] = ev.notes;
    return j;
}

Tensor embeddings_for(const Hin& hin, const ModelState& st) {
    EncoderInputs in = prepare_encoder_inputs(hin, st.enc.variant);
    return encode(in, st.enc).first;
}

struct TrainArgs {
    std::string data, out, config, resume;
    std::vector<std::string> metapaths;
    std::uint64_t seed = 0;
    int dim = 0, k = 0, per_node = 0, epochs1 = -1, epochs2 = -1, epochs3 = -1;
    double lr = 0.0, tau = 0.0;
    std::string encoder;
    bool no_contrastive = false, straight_through = false, ablation = false;
};

int run_train(const TrainArgs& a, const CLI::App& cmd) {
    Hin hin = load_hin_dir(a.data);
    TrainConfig cfg;
    ModelState resume_state;
    bool resuming = !a.resume.empty();
    if (resuming) {
        std::tie(resume_state, cfg) = load_checkpoint(a.resume);
    } else {
        if (!a.config.empty()) cfg = load_config(a.config);
        if (cmd.count("--metapath")) cfg.metapaths = a.metapaths;
        if (cmd.count("--seed")) cfg.seed = a.seed;
        if (cmd.count("--dim")) cfg.dim = a.dim;
        if (cmd.count("--k")) cfg.k = a.k;
        if (cmd.count("--per-node")) cfg.per_node = a.per_node;
        if (cmd.count("--epochs1")) cfg.epochs1 = a.epochs1;
        if (cmd.count("--epochs2")) cfg.epochs2 = a.epochs2;
        if (cmd.count("--epochs3")) cfg.epochs3 = a.epochs3;
        if (cmd.count("--lr")) cfg.lr = a.lr;
        if (cmd.count("--tau")) cfg.tau = a.tau;
        if (cmd.count("--encoder")) cfg.encoder = a.encoder;
        if (a.no_contrastive) cfg.use_contrastive = false;
        if (a.straight_through) cfg.straight_through = true;
        cfg.validate();
    }

    fs::create_directories(a.out);
    TrainResult result =
        resuming ? resume_training(hin, cfg, std::move(resume_state)) : train_all(hin, cfg);
    if (!cfg.use_contrastive)
        result.eval.notes.push_back("ablation arm: contrastive loss disabled");

    std::string ablation_json;
    if (a.ablation) {
        // Both arms share every seed substream; only the ablated term differs.
        TrainConfig other = cfg;
        other.use_contrastive = !cfg.use_contrastive;
        TrainResult alt = train_all(hin, other);
        ordered_json ab;
        ab[cfg.use_contrastive ? "with_contrastive" : "without_contrastive"] =
            metrics_json(result.eval);
        ab[other.use_contrastive ? "with_contrastive" : "without_contrastive"] =
            metrics_json(alt.eval);
        ablation_json = ab.dump();
    }

    write_text((fs::path(a.out) / "report.json").string(),
               report_json(hin, cfg, result, ablation_json));
    write_losses_csv(result.losses, result.state.schema_names,
                     (fs::path(a.out) / "losses.csv").string());
    write_embeddings_csv(hin, embeddings_for(hin, result.state),
                         (fs::path(a.out) / "embeddings.csv").string());
    write_clusters_csv(hin, result.eval, (fs::path(a.out) / "clusters.csv").string());
    save_checkpoint(result.state, cfg, (fs::path(a.out) / "model.ckpt").string());
    std::cout << "wrote " << a.out << " (nmi_joint=" << result.eval.nmi_joint
              << ", f1_micro=" << result.eval.f1_micro << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint cluster-aware embedding for heterogeneous information networks"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a planted-cluster HIN dataset");
    SynthSpec spec;
    std::string synth_out;
    synth->add_option("--out", synth_out, "output dataset directory")->required();
    synth->add_option("--k", spec.k, "planted clusters");
    synth->add_option("--types", spec.types, "node types");
    synth->add_option("--per-type", spec.per_type, "nodes per type per cluster");
    synth->add_option("--p-in", spec.p_in, "intra-cluster edge probability");
    synth->add_option("--p-out", spec.p_out, "inter-cluster edge probability");
    synth->add_option("--f", spec.f, "feature dimension");
    synth->add_option("--snr", spec.snr, "feature signal strength");
    synth->add_option("--seed", spec.seed, "generator seed");

    // sample-paths
    auto* paths = app.add_subcommand("sample-paths", "sample meta-path walks to a TSV");
    std::string paths_data, paths_mp, paths_out;
    int paths_per_node = 10;
    std::uint64_t paths_seed = 7;
    paths->add_option("--data", paths_data, "dataset directory")->required();
    paths->add_option("--metapath", paths_mp, "schema, e.g. A-P-A or APA")->required();
    paths->add_option("--out", paths_out, "output TSV file")->required();
    paths->add_option("--per-node", paths_per_node, "walks per start node");
    paths->add_option("--seed", paths_seed, "sampler seed");

    // train
    auto* train = app.add_subcommand("train", "run the three-stage training pipeline");
    TrainArgs ta;
    train->add_option("--data", ta.data, "dataset directory")->required();
    train->add_option("--out", ta.out, "output directory")->required();
    auto* cfg_opt = train->add_option("--config", ta.config, "JSON config file");
    auto* mp_opt = train->add_option("--metapath", ta.metapaths, "meta-path schema (repeatable)");
    auto* seed_opt = train->add_option("--seed", ta.seed, "master seed");
    train->add_option("--dim", ta.dim, "embedding dimension");
    train->add_option("--k", ta.k, "cluster count");
    train->add_option("--per-node", ta.per_node, "walks per start node");
    train->add_option("--epochs1", ta.epochs1, "stage-1 epochs");
    train->add_option("--epochs2", ta.epochs2, "stage-2 epochs");
    train->add_option("--epochs3", ta.epochs3, "stage-3 epochs");
    train->add_option("--lr", ta.lr, "learning rate");
    train->add_option("--tau", ta.tau, "gumbel-softmax temperature");
    train->add_option("--encoder", ta.encoder, "encoder variant: linear|gcn|gcn-plain");
    auto* noc_opt = train->add_flag("--no-contrastive", ta.no_contrastive,
                                    "drop the contrastive term (ablation arm)");
    train->add_flag("--straight-through", ta.straight_through,
                    "hard one-hot assignments with straight-through gradients");
    train->add_flag("--ablation", ta.ablation,
                    "also train the opposite contrastive arm and report both");
    auto* resume_opt =
        train->add_option("--resume", ta.resume, "checkpoint to resume from (its config is used)");
    resume_opt->excludes(cfg_opt)->excludes(mp_opt)->excludes(seed_opt)->excludes(noc_opt);

    // eval
    auto* eval = app.add_subcommand("eval", "recompute metrics from a saved model");
    std::string eval_data, eval_model, eval_out;
    eval->add_option("--data", eval_data, "dataset directory")->required();
    eval->add_option("--model", eval_model, "model checkpoint")->required();
    eval->add_option("--out", eval_out, "write metrics JSON here instead of stdout");

    // export
    auto* exp = app.add_subcommand("export", "write embeddings Z and cluster embeddings G");
    std::string exp_data, exp_model, exp_out;
    exp->add_option("--data", exp_data, "dataset directory")->required();
    exp->add_option("--model", exp_model, "model checkpoint")->required();
    exp->add_option("--out", exp_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(synth)) {
            Hin hin = generate_synthetic(spec);
            fs::create_directories(synth_out);
            save_hin(hin, synth_out);
            std::cout << "wrote " << synth_out << " (" << hin.n << " nodes, " << hin.edges.size()
                      << " edges)\n";
        } else if (app.got_subcommand(paths)) {
            Hin hin = load_hin_dir(paths_data);
            MetaPathSchema schema = parse_schema(paths_mp, hin);
            Rng rng = SeedStream(paths_seed).stream("walks", 0);
            MetaPathSampleSet set = sample_metapaths(hin, schema, paths_per_node, rng);
            save_samples(set, paths_out);
            std::cout << "wrote " << set.samples.size() << " walks to " << paths_out << "\n";
        } else if (app.got_subcommand(train)) {
            return run_train(ta, *train);
        } else if (app.got_subcommand(eval)) {
            auto [st, cfg] = load_checkpoint(eval_model);
            Hin hin = load_hin_dir(eval_data);
            TrainContext ctx = build_context(hin, cfg);
            std::string text = metrics_json(evaluate(ctx, st)).dump(2) + "\n";
            if (eval_out.empty())
                std::cout << text;
            else
                write_text(eval_out, text);
        } else if (app.got_subcommand(exp)) {
            auto [st, cfg] = load_checkpoint(exp_model);
            Hin hin = load_hin_dir(exp_data);
            fs::create_directories(exp_out);
            write_embeddings_csv(hin, embeddings_for(hin, st),
                                 (fs::path(exp_out) / "embeddings.csv").string());
            write_matrix_csv(st.g, "cluster", "g",
                             (fs::path(exp_out) / "cluster_embeddings.csv").string());
            std::cout << "wrote " << exp_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "hinforge: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
