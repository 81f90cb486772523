#include "hinforge/config.hpp"

#include "hinforge/errors.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace hinforge {

using nlohmann::ordered_json;

void TrainConfig::validate() const {
    if (dim < 1 || k < 1 || per_node < 1 || j_negatives < 1 || r_samples < 1)
        throw ArgumentError("config: counts must be >= 1");
    if (hidden < 0) throw ArgumentError("config: hidden must be >= 0");
    if (tau <= 0.0) throw ArgumentError("config: tau must be positive");
    if (lr <= 0.0) throw ArgumentError("config: lr must be positive");
    if (epochs1 < 0 || epochs2 < 0 || epochs3 < 0)
        throw ArgumentError("config: epoch counts must be >= 0");
    if (contrastive_batch < 1) throw ArgumentError("config: contrastive_batch must be >= 1");
    if (kmeans_restarts < 1 || kmeans_iters < 1)
        throw ArgumentError("config: kmeans settings must be >= 1");
    if (train_frac <= 0.0 || train_frac >= 1.0)
        throw ArgumentError("config: train_frac must be in (0,1)");
    if (encoder != "linear" && encoder != "gcn" && encoder != "gcn-plain")
        throw ArgumentError("config: unknown encoder '" + encoder + "'");
    if (nmi_norm != "sqrt" && nmi_norm != "arithmetic")
        throw ArgumentError("config: nmi_norm must be 'sqrt' or 'arithmetic'");
}

void apply_config_json(TrainConfig& cfg, const std::string& json_text,
                       const std::string& origin) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!doc.is_object()) throw SchemaError(origin + ": config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "dim") cfg.dim = value.get<int>();
            else if (key == "hidden") cfg.hidden = value.get<int>();
            else if (key == "k") cfg.k = value.get<int>();
            else if (key == "metapaths") cfg.metapaths = value.get<std::vector<std::string>>();
            else if (key == "per_node") cfg.per_node = value.get<int>();
            else if (key == "j_negatives") cfg.j_negatives = value.get<int>();
            else if (key == "r_samples") cfg.r_samples = value.get<int>();
            else if (key == "tau") cfg.tau = value.get<double>();
            else if (key == "lr") cfg.lr = value.get<double>();
            else if (key == "epochs1") cfg.epochs1 = value.get<int>();
            else if (key == "epochs2") cfg.epochs2 = value.get<int>();
            else if (key == "epochs3") cfg.epochs3 = value.get<int>();
            else if (key == "contrastive_batch") cfg.contrastive_batch = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "encoder") cfg.encoder = value.get<std::string>();
            else if (key == "use_contrastive") cfg.use_contrastive = value.get<bool>();
            else if (key == "kmeans_eval") cfg.kmeans_eval = value.get<bool>();
            else if (key == "stage2_train_encoder")
                cfg.stage2_train_encoder = value.get<bool>();
            else if (key == "straight_through") cfg.straight_through = value.get<bool>();
            else if (key == "nmi_norm") cfg.nmi_norm = value.get<std::string>();
            else if (key == "classifier_l2") cfg.classifier_l2 = value.get<double>();
            else if (key == "train_frac") cfg.train_frac = value.get<double>();
            else if (key == "kmeans_restarts") cfg.kmeans_restarts = value.get<int>();
            else if (key == "kmeans_iters") cfg.kmeans_iters = value.get<int>();
            else throw SchemaError(origin + ": unknown config key '" + key + "'");
        } catch (const SchemaError&) {
            throw;
        } catch (const std::exception& e) {
            throw SchemaError(origin + ": bad value for '" + key + "': " + e.what());
        }
    }
    cfg.validate();
}

TrainConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    TrainConfig cfg;
    apply_config_json(cfg, buf.str(), path);
    return cfg;
}

std::string config_to_json(const TrainConfig& cfg) {
    ordered_json doc;
    doc["dim"] = cfg.dim;
    doc["hidden"] = cfg.hidden;
    doc["k"] = cfg.k;
    doc["metapaths"] = cfg.metapaths;
    doc["per_node"] = cfg.per_node;
    doc["j_negatives"] = cfg.j_negatives;
    doc["r_samples"] = cfg.r_samples;
    doc["tau"] = cfg.tau;
    doc["lr"] = cfg.lr;
    doc["epochs1"] = cfg.epochs1;
    doc["epochs2"] = cfg.epochs2;
    doc["epochs3"] = cfg.epochs3;
    doc["contrastive_batch"] = cfg.contrastive_batch;
    doc["seed"] = cfg.seed;
    doc["encoder"] = cfg.encoder;
    doc["use_contrastive"] = cfg.use_contrastive;
    doc["kmeans_eval"] = cfg.kmeans_eval;
    doc["stage2_train_encoder"] = cfg.stage2_train_encoder;
    doc["straight_through"] = cfg.straight_through;
    doc["nmi_norm"] = cfg.nmi_norm;
    doc["classifier_l2"] = cfg.classifier_l2;
    doc["train_frac"] = cfg.train_frac;
    doc["kmeans_restarts"] = cfg.kmeans_restarts;
    doc["kmeans_iters"] = cfg.kmeans_iters;
    return doc.dump(2);
}

}  // namespace hinforge
