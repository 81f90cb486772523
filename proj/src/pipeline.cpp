#include "hinforge/pipeline.hpp"

#include "hinforge/contrastive.hpp"
#include "hinforge/errors.hpp"
#include "hinforge/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>
#include <tuple>

namespace hinforge {

namespace {

using nlohmann::ordered_json;

struct EpochOpts {
    int stage = 3;
    bool enc_term = true;
    bool c_term = true;
    const Tensor* c_targets = nullptr;
    bool recon_term = true;
    bool cont_term = true;
    bool train_encoder = true;
    bool train_g = true;
    bool train_w = true;
    bool use_eps = true;
};

std::vector<std::pair<int, int>> positive_pairs(const Hin& hin) {
    std::vector<std::pair<int, int>> pos;
    pos.reserve(hin.edges.size());
    for (const Edge& e : hin.edges) pos.emplace_back(e.src, e.dst);
    return pos;
}

std::vector<std::vector<int>> pick_batch(const std::vector<std::vector<int>>& all, int cap,
                                         Rng& rng) {
    if (static_cast<int>(all.size()) <= cap) return all;
    std::vector<int> idx(all.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < cap; ++k) {
        int pick = k + rng.uniform_int(static_cast<int>(idx.size()) - k);
        std::swap(idx[k], idx[pick]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    std::vector<std::vector<int>> out;
    out.reserve(cap);
    for (int i : idx) out.push_back(all[i]);
    return out;
}

// Edge BCE with the plain inner-product decoder; stage-1 warm-up for the
// non-variational encoder.
Var plain_edge_bce_tape(Tape& tape, const std::vector<std::pair<int, int>>& positives,
                        const std::vector<std::pair<int, int>>& negatives, Var z) {
    std::vector<int> is, js;
    Tensor y(static_cast<int>(positives.size() + negatives.size()), 1);
    int row = 0;
    for (const auto& [i, j] : positives) {
        is.push_back(i);
        js.push_back(j);
        y.at(row++, 0) = 1.0;
    }
    for (const auto& [i, j] : negatives) {
        is.push_back(i);
        js.push_back(j);
        y.at(row++, 0) = 0.0;
    }
    Var zi = tape.gather_rows(z, is);
    Var zj = tape.gather_rows(z, js);
    Var p = tape.clamp(tape.sigmoid(tape.row_sum(tape.mul(zi, zj))), kProbClamp,
                       1.0 - kProbClamp);
    Var yv = tape.input(y);
    Var term = tape.add(tape.mul(yv, tape.log(p)),
                        tape.mul(tape.affine(yv, -1.0, 1.0), tape.log(tape.affine(p, -1.0, 1.0))));
    return tape.scale(tape.mean(term), -1.0);
}

LossReport run_epoch(const TrainContext& ctx, ModelState& st, Adam& adam, int epoch,
                     const EpochOpts& o) {
    const Hin& hin = *ctx.hin;
    const TrainConfig& cfg = ctx.cfg;
    const int n = hin.n, d = st.enc.d;
    const bool var_enc = st.enc.variational();

    Tape tape;
    EncoderVars ev;
    if (o.train_encoder) {
        ev = place_encoder_params(tape, st.enc);
    } else {
        ev.w0 = tape.input(st.enc.w0);
        ev.wmu = tape.input(st.enc.wmu);
        ev.wsigma = tape.input(st.enc.wsigma);
    }
    auto [mu, ls] = encode_tape(tape, ctx.inputs, st.enc, ev);

    Rng eps_rng = ctx.seeds.stream("eps", o.stage, epoch);
    Var z = mu;
    if (o.use_eps && var_enc)
        z = reparameterize_tape(tape, mu, ls, Tensor::gaussian(n, d, eps_rng));
    Var gvar = o.train_g ? tape.param(st.g) : tape.input(st.g);
    Var rep_const = tape.input(ctx.rep);
    Var zhat = tape.matmul(rep_const, z);

    LossReport rep;
    rep.stage = o.stage;
    rep.epoch = epoch;
    rep.per_path.assign(ctx.schemas.size(), 0.0);
    std::vector<Var> terms;

    if (o.enc_term && var_enc) {
        Var le = l_enc_tape(tape, mu, ls);
        rep.enc = tape.value(le).at(0, 0);
        terms.push_back(le);
    }

    if (o.c_targets) {
        Var p = cluster_distribution_tape(tape, z, gvar);
        Var lc = l_c_tape(tape, tape.input(*o.c_targets), p);
        rep.c = tape.value(lc).at(0, 0);
        terms.push_back(lc);
    } else if (o.c_term) {
        const int draws = (o.use_eps && var_enc) ? cfg.r_samples : 1;
        Var acc;
        for (int r = 0; r < draws; ++r) {
            Var zr = z, zhr = zhat;
            if (r > 0) {
                zr = reparameterize_tape(tape, mu, ls, Tensor::gaussian(n, d, eps_rng));
                zhr = tape.matmul(rep_const, zr);
            }
            Var kl = l_c_tape(tape, cluster_distribution_tape(tape, zhr, gvar),
                              cluster_distribution_tape(tape, zr, gvar));
            acc = r == 0 ? kl : tape.add(acc, kl);
        }
        Var lc = draws > 1 ? tape.scale(acc, 1.0 / draws) : acc;
        rep.c = tape.value(lc).at(0, 0);
        terms.push_back(lc);
    }

    if (o.recon_term && !hin.edges.empty()) {
        Rng grng = ctx.seeds.stream("gumbel", o.stage, epoch);
        Var logits = tape.matmul(zhat, tape.transpose(gvar));
        Var soft = gumbel_softmax_tape(tape, logits, sample_gumbel(n, cfg.k, grng), cfg.tau);
        Var assign = cfg.straight_through ? tape.hard_onehot_rows(soft, true) : soft;
        Rng nrng = ctx.seeds.stream("negatives", o.stage, epoch);
        EdgeSample negs = sample_negative_edges(hin, static_cast<int>(hin.edges.size()), nrng);
        Var lr = l_recon_tape(tape, positive_pairs(hin), negs.pairs, z, assign, gvar);
        rep.recon = tape.value(lr).at(0, 0);
        terms.push_back(lr);
    }

    std::vector<Var> wvars(ctx.schemas.size());
    if (o.cont_term && cfg.use_contrastive && !ctx.schemas.empty()) {
        Rng crng = ctx.seeds.stream("corrupt", o.stage, epoch);
        Tensor xbar = corrupt_features(hin.features, crng);
        EncoderInputs in_bar = prepare_encoder_inputs(xbar, ctx.inputs.ahat, st.enc.variant);
        auto [mub, lsb] = encode_tape(tape, in_bar, st.enc, ev);
        Var zbar = mub;
        if (o.use_eps && var_enc) {
            Rng cerng = ctx.seeds.stream("corrupt-eps", o.stage, epoch);
            zbar = reparameterize_tape(tape, mub, lsb, Tensor::gaussian(n, d, cerng));
        }
        Rng brng = ctx.seeds.stream("batch", o.stage, epoch);
        for (size_t p = 0; p < ctx.schemas.size(); ++p) {
            if (ctx.walks[p].empty()) continue;
            auto batch = pick_batch(ctx.walks[p], cfg.contrastive_batch, brng);
            Var w = o.train_w ? tape.param(st.w_disc[p]) : tape.input(st.w_disc[p]);
            wvars[p] = w;
            Var lp = l_p_tape(tape, batch, z, zbar, w, cfg.j_negatives);
            rep.per_path[p] = tape.value(lp).at(0, 0);
            terms.push_back(lp);
        }
    }

    if (terms.empty()) return rep;
    Var total = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) total = tape.add(total, terms[i]);
    rep.total = tape.value(total).at(0, 0);

    std::vector<Var> wrt;
    std::vector<Tensor*> params;
    if (o.train_encoder) {
        wrt.insert(wrt.end(), {ev.w0, ev.wmu, ev.wsigma});
        params.insert(params.end(), {&st.enc.w0, &st.enc.wmu, &st.enc.wsigma});
    }
    if (o.train_g) {
        wrt.push_back(gvar);
        params.push_back(&st.g);
    }
    for (size_t p = 0; p < wvars.size(); ++p)
        if (o.train_w && wvars[p].id >= 0) {
            wrt.push_back(wvars[p]);
            params.push_back(&st.w_disc[p]);
        }
    adam.step(params, tape.grad(total, wrt));
    return rep;
}

}  // namespace

TrainContext build_context(const Hin& hin, const TrainConfig& cfg) {
    cfg.validate();
    TrainContext ctx;
    ctx.hin = &hin;
    ctx.cfg = cfg;
    ctx.seeds = SeedStream(cfg.seed);
    EncoderVariant variant = parse_encoder_variant(cfg.encoder);
    ctx.inputs = prepare_encoder_inputs(hin, variant);
    for (size_t p = 0; p < cfg.metapaths.size(); ++p) {
        MetaPathSchema schema = parse_schema(cfg.metapaths[p], hin);
        Rng wrng = ctx.seeds.stream("walks", p);
        MetaPathSampleSet set = sample_metapaths(hin, schema, cfg.per_node, wrng);
        ctx.schemas.push_back(std::move(schema));
        ctx.walks.push_back(std::move(set.samples));
    }
    for (const auto& walks : ctx.walks)
        ctx.samples_union.insert(ctx.samples_union.end(), walks.begin(), walks.end());
    ctx.zeta = build_zeta(ctx.samples_union, hin.n);
    ctx.rep = representative_matrix(ctx.zeta, ctx.samples_union, hin, &ctx.rep_tags);
    return ctx;
}

ModelState init_state(const TrainContext& ctx) {
    const TrainConfig& cfg = ctx.cfg;
    ModelState st;
    Rng erng = ctx.seeds.stream("encoder-init");
    st.enc = init_encoder(parse_encoder_variant(cfg.encoder), ctx.inputs.x.cols,
                          cfg.hidden_or_default(), cfg.dim, erng);
    st.g = Tensor::zeros(cfg.k, cfg.dim);
    Rng drng = ctx.seeds.stream("disc-init");
    for (const auto& schema : ctx.schemas) {
        st.w_disc.push_back(
            init_discriminator(static_cast<int>(schema.type_sequence.size()), cfg.dim, drng));
        st.schema_names.push_back(schema.name);
    }
    return st;
}

void stage1_pretrain(const TrainContext& ctx, ModelState& st, std::vector<LossReport>& losses) {
    const TrainConfig& cfg = ctx.cfg;
    const Hin& hin = *ctx.hin;
    Adam adam({cfg.lr});
    for (int epoch = 0; epoch < cfg.epochs1; ++epoch) {
        try {
            Tape tape;
            EncoderVars ev = place_encoder_params(tape, st.enc);
            auto [mu, ls] = encode_tape(tape, ctx.inputs, st.enc, ev);
            LossReport rep;
            rep.stage = 1;
            rep.epoch = epoch;
            rep.per_path.assign(ctx.schemas.size(), 0.0);
            Var loss;
            if (st.enc.variational()) {
                loss = l_enc_tape(tape, mu, ls);
                rep.enc = tape.value(loss).at(0, 0);
            } else {
                if (hin.edges.empty()) break;  // nothing to warm up against
                Rng nrng = ctx.seeds.stream("negatives", 1, epoch);
                EdgeSample negs =
                    sample_negative_edges(hin, static_cast<int>(hin.edges.size()), nrng);
                loss = plain_edge_bce_tape(tape, positive_pairs(hin), negs.pairs, mu);
                rep.recon = tape.value(loss).at(0, 0);
            }
            rep.total = tape.value(loss).at(0, 0);
            adam.step({&st.enc.w0, &st.enc.wmu, &st.enc.wsigma},
                      tape.grad(loss, {ev.w0, ev.wmu, ev.wsigma}));
            losses.push_back(rep);
        } catch (const NumericError& e) {
            throw TrainingError("stage 1 epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }
    st.stage_done = std::max(st.stage_done, 1);
}

void stage2_init_clusters(const TrainContext& ctx, ModelState& st,
                          std::vector<LossReport>& losses) {
    const TrainConfig& cfg = ctx.cfg;
    if (cfg.k > ctx.hin->n) throw ArgumentError("stage 2: k exceeds node count");
    Tensor mu = encode(ctx.inputs, st.enc).first;
    KMeansResult km = kmeans(mu, cfg.k, cfg.kmeans_iters, cfg.kmeans_restarts,
                             ctx.seeds.stream("kmeans").next_u64());
    Tensor targets = distance_softmax_init(mu, km.centers);
    st.g = km.centers;

    Adam adam({cfg.lr});
    EpochOpts o;
    o.stage = 2;
    o.enc_term = false;
    o.c_term = false;
    o.c_targets = &targets;
    o.train_encoder = cfg.stage2_train_encoder;
    o.use_eps = false;
    for (int epoch = 0; epoch < cfg.epochs2; ++epoch) {
        try {
            losses.push_back(run_epoch(ctx, st, adam, epoch, o));
        } catch (const NumericError& e) {
            throw TrainingError("stage 2 epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }
    st.stage_done = std::max(st.stage_done, 2);
}

void stage3_joint(const TrainContext& ctx, ModelState& st, std::vector<LossReport>& losses) {
    const TrainConfig& cfg = ctx.cfg;
    Adam adam({cfg.lr});
    EpochOpts o;
    o.stage = 3;
    o.cont_term = cfg.use_contrastive;
    for (int epoch = 0; epoch < cfg.epochs3; ++epoch) {
        try {
            losses.push_back(run_epoch(ctx, st, adam, epoch, o));
        } catch (const NumericError& e) {
            throw TrainingError("stage 3 epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }
    st.stage_done = std::max(st.stage_done, 3);
}

Tensor final_embeddings(const TrainContext& ctx, const ModelState& st) {
    return encode(ctx.inputs, st.enc).first;
}

EvalReport evaluate(const TrainContext& ctx, const ModelState& st) {
    const TrainConfig& cfg = ctx.cfg;
    const Hin& hin = *ctx.hin;
    EvalReport ev;
    Tensor z = final_embeddings(ctx, st);
    Tensor zhat = matmul(ctx.rep, z);
    ev.joint_labels = argmax_assignments(cluster_posterior(zhat, st.g));
    if (cfg.kmeans_eval)
        ev.kmeans_labels = kmeans(z, cfg.k, cfg.kmeans_iters, cfg.kmeans_restarts,
                                  ctx.seeds.stream("kmeans-eval").next_u64())
                               .assignments;

    std::vector<int> labeled_ids;
    for (int i = 0; i < hin.n; ++i)
        if (hin.labels[i] >= 0) labeled_ids.push_back(i);
    ev.labeled = static_cast<int>(labeled_ids.size());
    if (labeled_ids.empty()) {
        ev.notes.push_back("no ground-truth labels; clustering/classification metrics skipped");
        return ev;
    }
    ev.has_labels = true;
    NmiNorm norm = cfg.nmi_norm == "sqrt" ? NmiNorm::sqrt_mean : NmiNorm::arithmetic_mean;
    std::vector<int> truth, joint_l, km_l;
    for (int i : labeled_ids) {
        truth.push_back(hin.labels[i]);
        joint_l.push_back(ev.joint_labels[i]);
        if (cfg.kmeans_eval) km_l.push_back(ev.kmeans_labels[i]);
    }
    ev.nmi_joint = nmi(joint_l, truth, norm);
    if (cfg.kmeans_eval) ev.nmi_kmeans = nmi(km_l, truth, norm);

    std::set<int> class_set(truth.begin(), truth.end());
    std::vector<int> class_values(class_set.begin(), class_set.end());
    if (class_values.size() < 2) {
        ev.f1_micro = ev.f1_macro = 1.0;
        ev.notes.push_back("single labeled class; classifier trivially perfect");
        return ev;
    }
    std::vector<int> y(truth.size());
    for (size_t i = 0; i < truth.size(); ++i)
        y[i] = static_cast<int>(std::lower_bound(class_values.begin(), class_values.end(),
                                                 truth[i]) -
                                class_values.begin());
    auto [train_idx, test_idx] =
        stratified_split(y, cfg.train_frac, ctx.seeds.stream("split").next_u64());
    std::vector<int> train_rows, y_train, test_rows, y_test;
    for (int i : train_idx) {
        train_rows.push_back(labeled_ids[i]);
        y_train.push_back(y[i]);
    }
    for (int i : test_idx) {
        test_rows.push_back(labeled_ids[i]);
        y_test.push_back(y[i]);
    }
    ClassifierModel model =
        train_classifier(gather_rows(z, train_rows), y_train,
                         static_cast<int>(class_values.size()), cfg.classifier_l2);
    if (test_idx.empty()) {
        ev.notes.push_back("held-out split empty; F1 computed on the training rows");
        auto pred = classify(model, gather_rows(z, train_rows));
        std::tie(ev.f1_micro, ev.f1_macro) = f1_scores(pred, y_train);
    } else {
        auto pred = classify(model, gather_rows(z, test_rows));
        std::tie(ev.f1_micro, ev.f1_macro) = f1_scores(pred, y_test);
    }
    return ev;
}

std::pair<double, double> discriminator_separation(const TrainContext& ctx,
                                                   const ModelState& st) {
    const Hin& hin = *ctx.hin;
    Tensor z = final_embeddings(ctx, st);
    Rng crng = ctx.seeds.stream("separation-corrupt");
    Tensor xbar = corrupt_features(hin.features, crng);
    EncoderInputs in_bar = prepare_encoder_inputs(xbar, ctx.inputs.ahat, st.enc.variant);
    Tensor zbar = encode(in_bar, st.enc).first;
    double pos_acc = 0.0, neg_acc = 0.0;
    long count = 0;
    for (size_t p = 0; p < ctx.schemas.size(); ++p) {
        for (const auto& walk : ctx.walks[p]) {
            Tensor zp = encode_sample(walk, z);
            Tensor s = summary(zp);
            pos_acc += discriminate(zp, s, st.w_disc[p]);
            neg_acc += discriminate(encode_sample(walk, zbar), s, st.w_disc[p]);
            ++count;
        }
    }
    if (count == 0) throw ArgumentError("discriminator_separation: no walks");
    return {pos_acc / count, neg_acc / count};
}

TrainResult resume_training(const Hin& hin, const TrainConfig& cfg, ModelState st) {
    auto t0 = std::chrono::steady_clock::now();
    TrainContext ctx = build_context(hin, cfg);
    TrainResult result;
    if (st.stage_done < 1) stage1_pretrain(ctx, st, result.losses);
    if (st.stage_done < 2) stage2_init_clusters(ctx, st, result.losses);
    if (st.stage_done < 3) stage3_joint(ctx, st, result.losses);
    result.eval = evaluate(ctx, st);
    result.state = std::move(st);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

TrainResult train_all(const Hin& hin, const TrainConfig& cfg) {
    TrainContext ctx = build_context(hin, cfg);
    return resume_training(hin, cfg, init_state(ctx));
}

namespace {

void write_bytes(std::ofstream& out, const void* ptr, size_t len) {
    out.write(static_cast<const char*>(ptr), static_cast<std::streamsize>(len));
}

void read_bytes(std::ifstream& in, void* ptr, size_t len) {
    in.read(static_cast<char*>(ptr), static_cast<std::streamsize>(len));
    if (!in) throw ParseError("checkpoint: truncated file");
}

void write_u64(std::ofstream& out, std::uint64_t v) { write_bytes(out, &v, 8); }
void write_i32(std::ofstream& out, std::int32_t v) { write_bytes(out, &v, 4); }

std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v;
    read_bytes(in, &v, 8);
    return v;
}

std::int32_t read_i32(std::ifstream& in) {
    std::int32_t v;
    read_bytes(in, &v, 4);
    return v;
}

void write_string(std::ofstream& out, const std::string& s) {
    write_u64(out, s.size());
    write_bytes(out, s.data(), s.size());
}

std::string read_string(std::ifstream& in) {
    std::uint64_t len = read_u64(in);
    if (len > (1ULL << 30)) throw ParseError("checkpoint: implausible string length");
    std::string s(len, '\0');
    read_bytes(in, s.data(), len);
    return s;
}

void write_tensor(std::ofstream& out, const Tensor& t) {
    write_i32(out, t.rows);
    write_i32(out, t.cols);
    write_bytes(out, t.data.data(), t.data.size() * sizeof(double));
}

Tensor read_tensor(std::ifstream& in) {
    std::int32_t rows = read_i32(in), cols = read_i32(in);
    if (rows < 0 || cols < 0 || static_cast<long>(rows) * cols > (1L << 28))
        throw ParseError("checkpoint: implausible tensor shape");
    Tensor t(rows, cols);
    read_bytes(in, t.data.data(), t.data.size() * sizeof(double));
    return t;
}

constexpr char kCkptMagic[5] = {'H', 'I', 'N', 'F', '1'};

}  // namespace

void save_checkpoint(const ModelState& st, const TrainConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path);
    write_bytes(out, kCkptMagic, 5);
    write_i32(out, 1);  // format version
    write_string(out, config_to_json(cfg));
    write_string(out, encoder_variant_name(st.enc.variant));
    write_i32(out, st.enc.f);
    write_i32(out, st.enc.h);
    write_i32(out, st.enc.d);
    write_tensor(out, st.enc.w0);
    write_tensor(out, st.enc.wmu);
    write_tensor(out, st.enc.wsigma);
    write_tensor(out, st.g);
    write_i32(out, static_cast<std::int32_t>(st.w_disc.size()));
    for (size_t p = 0; p < st.w_disc.size(); ++p) {
        write_string(out, st.schema_names[p]);
        write_tensor(out, st.w_disc[p]);
    }
    write_i32(out, st.stage_done);
    if (!out) throw IoError("short write to checkpoint " + path);
}

std::pair<ModelState, TrainConfig> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    char magic[5];
    read_bytes(in, magic, 5);
    if (std::memcmp(magic, kCkptMagic, 5) != 0)
        throw ParseError(path + ": not a model checkpoint (bad magic)");
    std::int32_t version = read_i32(in);
    if (version != 1) throw ParseError(path + ": unsupported checkpoint version");
    TrainConfig cfg;
    apply_config_json(cfg, read_string(in), path);
    ModelState st;
    st.enc.variant = parse_encoder_variant(read_string(in));
    st.enc.f = read_i32(in);
    st.enc.h = read_i32(in);
    st.enc.d = read_i32(in);
    st.enc.w0 = read_tensor(in);
    st.enc.wmu = read_tensor(in);
    st.enc.wsigma = read_tensor(in);
    st.g = read_tensor(in);
    std::int32_t nw = read_i32(in);
    if (nw < 0 || nw > 1024) throw ParseError(path + ": implausible discriminator count");
    for (std::int32_t p = 0; p < nw; ++p) {
        st.schema_names.push_back(read_string(in));
        st.w_disc.push_back(read_tensor(in));
    }
    st.stage_done = read_i32(in);
    return {std::move(st), cfg};
}

std::string report_json(const Hin& hin, const TrainConfig& cfg, const TrainResult& result,
                        const std::string& ablation_json) {
    ordered_json doc;
    doc["dataset"] = {{"nodes", hin.n},
                      {"edges", hin.edges.size()},
                      {"node_types", hin.type_names},
                      {"relations", hin.relation_names},
                      {"labeled", result.eval.labeled}};
    doc["config"] = ordered_json::parse(config_to_json(cfg));
    const LossReport* last = result.losses.empty() ? nullptr : &result.losses.back();
    ordered_json fl;
    fl["enc"] = last ? last->enc : 0.0;
    fl["c"] = last ? last->c : 0.0;
    fl["recon"] = last ? last->recon : 0.0;
    ordered_json per;
    for (size_t p = 0; p < result.state.schema_names.size(); ++p)
        per[result.state.schema_names[p]] =
            last && p < last->per_path.size() ? last->per_path[p] : 0.0;
    fl["per_path"] = per;
    fl["total"] = last ? last->total : 0.0;
    doc["final_losses"] = fl;
    ordered_json metrics;
    metrics["has_labels"] = result.eval.has_labels;
    metrics["nmi_joint"] = result.eval.nmi_joint;
    metrics["nmi_kmeans"] = result.eval.nmi_kmeans;
    metrics["f1_micro"] = result.eval.f1_micro;
    metrics["f1_macro"] = result.eval.f1_macro;
    doc["metrics"] = metrics;
    if (!ablation_json.empty()) doc["ablation"] = ordered_json::parse(ablation_json);
    ordered_json notes = ordered_json::array();
    for (const auto& w : hin.warnings) notes.push_back(w);
    for (const auto& n : result.eval.notes) notes.push_back(n);
    doc["notes"] = notes;
    doc["stage_done"] = result.state.stage_done;
    doc["wall_clock_seconds"] = result.wall_seconds;
    return doc.dump(2) + "\n";
}

void write_losses_csv(const std::vector<LossReport>& losses,
                      const std::vector<std::string>& schema_names, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "stage,epoch,l_enc,l_c,l_recon";
    for (const auto& name : schema_names) out << ",l_" << name;
    out << ",total\n";
    char buf[40];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (const auto& r : losses) {
        out << r.stage << ',' << r.epoch;
        emit(r.enc);
        emit(r.c);
        emit(r.recon);
        for (size_t p = 0; p < schema_names.size(); ++p)
            emit(p < r.per_path.size() ? r.per_path[p] : 0.0);
        emit(r.total);
        out << '\n';
    }
}

void write_embeddings_csv(const Hin& hin, const Tensor& z, const std::string& path) {
    if (z.rows != hin.n) throw ShapeError("write_embeddings_csv: row count mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "node";
    for (int j = 0; j < z.cols; ++j) out << ",z" << j;
    out << '\n';
    char buf[40];
    for (int i = 0; i < hin.n; ++i) {
        out << hin.node_names[i];
        for (int j = 0; j < z.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", z.at(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

void write_clusters_csv(const Hin& hin, const EvalReport& eval, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "node,joint_cluster,kmeans_cluster\n";
    for (int i = 0; i < hin.n; ++i) {
        out << hin.node_names[i] << ','
            << (i < static_cast<int>(eval.joint_labels.size()) ? eval.joint_labels[i] : -1) << ','
            << (i < static_cast<int>(eval.kmeans_labels.size()) ? eval.kmeans_labels[i] : -1)
            << '\n';
    }
}

}  // namespace hinforge
