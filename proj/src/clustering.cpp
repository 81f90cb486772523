#include "hinforge/clustering.hpp"

#include "hinforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace hinforge {

namespace {

double dist2(const Tensor& a, int i, const Tensor& b, int j) {
    double acc = 0.0;
    for (int t = 0; t < a.cols; ++t) {
        const double diff = a.at(i, t) - b.at(j, t);
        acc += diff * diff;
    }
    return acc;
}

Tensor kmeanspp_init(const Tensor& z, int k, Rng& rng) {
    const int n = z.rows;
    Tensor centers(k, z.cols);
    std::vector<double> best(n, 0.0);
    int first = rng.uniform_int(n);
    std::copy(z.row(first), z.row(first) + z.cols, centers.row(0));
    for (int i = 0; i < n; ++i) best[i] = dist2(z, i, centers, 0);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : best) total += v;
        int pick;
        if (total <= 0.0) {
            pick = rng.uniform_int(n);
        } else {
            double u = rng.uniform() * total;
            pick = n - 1;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += best[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        std::copy(z.row(pick), z.row(pick) + z.cols, centers.row(c));
        for (int i = 0; i < n; ++i) best[i] = std::min(best[i], dist2(z, i, centers, c));
    }
    return centers;
}

}  // namespace

KMeansResult kmeans(const Tensor& z, int k, int max_iters, int restarts, std::uint64_t seed) {
    const int n = z.rows;
    if (k < 1 || k > n) throw ArgumentError("kmeans: need 1 <= k <= point count");
    if (max_iters < 1 || restarts < 1) throw ArgumentError("kmeans: iters/restarts must be >= 1");

    KMeansResult best;
    bool have_best = false;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(hash_combine(seed, static_cast<std::uint64_t>(r)));
        Tensor centers = kmeanspp_init(z, k, rng);
        std::vector<int> assign(n, -1), prev(n, -2);
        std::vector<double> history;
        double inertia = 0.0;
        for (int iter = 0; iter < max_iters; ++iter) {
            for (int repair = 0;; ++repair) {
                inertia = 0.0;
                std::vector<int> count(k, 0);
                for (int i = 0; i < n; ++i) {
                    int arg = 0;
                    double bd = dist2(z, i, centers, 0);
                    for (int c = 1; c < k; ++c) {
                        double dd = dist2(z, i, centers, c);
                        if (dd < bd) {
                            bd = dd;
                            arg = c;
                        }
                    }
                    assign[i] = arg;
                    count[arg]++;
                    inertia += bd;
                }
                int empty = -1;
                for (int c = 0; c < k; ++c)
                    if (count[c] == 0) {
                        empty = c;
                        break;
                    }
                if (empty < 0 || repair >= k) break;
                // Reseed the empty cluster to the farthest point.
                int far = 0;
                double fd = -1.0;
                for (int i = 0; i < n; ++i) {
                    double dd = dist2(z, i, centers, assign[i]);
                    if (dd > fd) {
                        fd = dd;
                        far = i;
                    }
                }
                std::copy(z.row(far), z.row(far) + z.cols, centers.row(empty));
            }
            history.push_back(inertia);
            if (assign == prev) break;
            prev = assign;
            Tensor sums = Tensor::zeros(k, z.cols);
            std::vector<int> count(k, 0);
            for (int i = 0; i < n; ++i) {
                count[assign[i]]++;
                for (int t = 0; t < z.cols; ++t) sums.at(assign[i], t) += z.at(i, t);
            }
            for (int c = 0; c < k; ++c)
                if (count[c] > 0)
                    for (int t = 0; t < z.cols; ++t)
                        centers.at(c, t) = sums.at(c, t) / static_cast<double>(count[c]);
        }
        if (!have_best || inertia < best.inertia) {
            best.centers = centers;
            best.assignments = assign;
            best.inertia = inertia;
            best.inertia_history = history;
            have_best = true;
        }
    }
    return best;
}

Tensor distance_softmax_init(const Tensor& z, const Tensor& centers) {
    if (z.cols != centers.cols) throw ShapeError("distance_softmax_init: dim mismatch");
    Tensor neg(z.rows, centers.rows);
    for (int i = 0; i < z.rows; ++i)
        for (int c = 0; c < centers.rows; ++c) neg.at(i, c) = -std::sqrt(dist2(z, i, centers, c));
    return softmax_rows(neg);
}

std::vector<int> argmax_assignments(const Tensor& q) {
    std::vector<int> out(q.rows);
    for (int i = 0; i < q.rows; ++i) {
        int arg = 0;
        for (int c = 1; c < q.cols; ++c)
            if (q.at(i, c) > q.at(i, arg)) arg = c;
        out[i] = arg;
    }
    return out;
}

double nmi(const std::vector<int>& a, const std::vector<int>& b, NmiNorm norm) {
    if (a.size() != b.size()) throw ArgumentError("nmi: length mismatch");
    if (a.empty()) throw ArgumentError("nmi: empty labelings");
    const double n = static_cast<double>(a.size());
    std::unordered_map<int, int> amap, bmap;
    for (int v : a) amap.emplace(v, static_cast<int>(amap.size()));
    for (int v : b) bmap.emplace(v, static_cast<int>(bmap.size()));
    const int ka = static_cast<int>(amap.size()), kb = static_cast<int>(bmap.size());
    std::vector<double> joint(static_cast<size_t>(ka) * kb, 0.0), pa(ka, 0.0), pb(kb, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        int ia = amap[a[i]], ib = bmap[b[i]];
        joint[static_cast<size_t>(ia) * kb + ib] += 1.0 / n;
        pa[ia] += 1.0 / n;
        pb[ib] += 1.0 / n;
    }
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (double p : pa)
        if (p > 0.0) ha -= p * std::log(p);
    for (double p : pb)
        if (p > 0.0) hb -= p * std::log(p);
    for (int ia = 0; ia < ka; ++ia)
        for (int ib = 0; ib < kb; ++ib) {
            double p = joint[static_cast<size_t>(ia) * kb + ib];
            if (p > 0.0) mi += p * std::log(p / (pa[ia] * pb[ib]));
        }
    if (ha == 0.0 && hb == 0.0) return 1.0;
    if (ha == 0.0 || hb == 0.0) return 0.0;
    double denom = norm == NmiNorm::sqrt_mean ? std::sqrt(ha * hb) : 0.5 * (ha + hb);
    return std::min(1.0, std::max(0.0, mi / denom));
}

namespace {

// Cross-entropy plus (l2/2)*||W||^2 over non-bias rows; gradient into gw.
double classifier_objective(const Tensor& xb, const std::vector<int>& y, int classes, double l2,
                            const std::vector<double>& w, std::vector<double>& gw) {
    const int n = xb.rows, dim = xb.cols;
    std::fill(gw.begin(), gw.end(), 0.0);
    double loss = 0.0;
    std::vector<double> logits(classes), probs(classes);
    for (int i = 0; i < n; ++i) {
        double mx = -1e300;
        for (int c = 0; c < classes; ++c) {
            double acc = 0.0;
            for (int t = 0; t < dim; ++t) acc += xb.at(i, t) * w[static_cast<size_t>(t) * classes + c];
            logits[c] = acc;
            mx = std::max(mx, acc);
        }
        double denom = 0.0;
        for (int c = 0; c < classes; ++c) {
            probs[c] = std::exp(logits[c] - mx);
            denom += probs[c];
        }
        for (int c = 0; c < classes; ++c) probs[c] /= denom;
        loss -= std::log(std::max(probs[y[i]], 1e-300));
        for (int c = 0; c < classes; ++c) {
            const double delta = probs[c] - (c == y[i] ? 1.0 : 0.0);
            for (int t = 0; t < dim; ++t)
                gw[static_cast<size_t>(t) * classes + c] += xb.at(i, t) * delta;
        }
    }
    for (int t = 0; t + 1 < dim; ++t)  // last row is the bias
        for (int c = 0; c < classes; ++c) {
            const size_t idx = static_cast<size_t>(t) * classes + c;
            loss += 0.5 * l2 * w[idx] * w[idx];
            gw[idx] += l2 * w[idx];
        }
    return loss;
}

}  // namespace

ClassifierModel train_classifier(const Tensor& z, const std::vector<int>& y, int classes,
                                 double l2) {
    if (static_cast<int>(y.size()) != z.rows)
        throw ArgumentError("train_classifier: label count mismatch");
    if (classes < 2) throw ArgumentError("train_classifier: need at least 2 classes");
    std::vector<int> seen(classes, 0);
    for (int v : y) {
        if (v < 0 || v >= classes) throw ArgumentError("train_classifier: label out of range");
        seen[v] = 1;
    }
    for (int c = 0; c < classes; ++c)
        if (!seen[c])
            throw ArgumentError("train_classifier: class " + std::to_string(c) +
                                " absent from training data");

    Tensor xb(z.rows, z.cols + 1);
    for (int i = 0; i < z.rows; ++i) {
        std::copy(z.row(i), z.row(i) + z.cols, xb.row(i));
        xb.at(i, z.cols) = 1.0;
    }
    const size_t nw = static_cast<size_t>(xb.cols) * classes;
    std::vector<double> w(nw, 0.0), g(nw), gnew(nw), dir(nw), wnew(nw);
    double f = classifier_objective(xb, y, classes, l2, w, g);

    // L-BFGS two-loop recursion with an Armijo backtracking line search.
    const int hist_cap = 10, max_iter = 500;
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    for (int iter = 0; iter < max_iter; ++iter) {
        double gnorm = 0.0;
        for (double v : g) gnorm += v * v;
        if (std::sqrt(gnorm) < 1e-6) break;

        dir = g;
        std::vector<double> alpha(s_hist.size());
        for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
            double sd = 0.0;
            for (size_t t = 0; t < nw; ++t) sd += s_hist[h][t] * dir[t];
            alpha[h] = rho_hist[h] * sd;
            for (size_t t = 0; t < nw; ++t) dir[t] -= alpha[h] * y_hist[h][t];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& sl = s_hist.back();
            const auto& yl = y_hist.back();
            for (size_t t = 0; t < nw; ++t) {
                sy += sl[t] * yl[t];
                yy += yl[t] * yl[t];
            }
            if (yy > 0.0) {
                const double gamma = sy / yy;
                for (auto& v : dir) v *= gamma;
            }
        }
        for (int h = 0; h < static_cast<int>(s_hist.size()); ++h) {
            double yd = 0.0;
            for (size_t t = 0; t < nw; ++t) yd += y_hist[h][t] * dir[t];
            const double beta = rho_hist[h] * yd;
            for (size_t t = 0; t < nw; ++t) dir[t] += (alpha[h] - beta) * s_hist[h][t];
        }
        for (auto& v : dir) v = -v;

        double slope = 0.0;
        for (size_t t = 0; t < nw; ++t) slope += g[t] * dir[t];
        if (slope >= 0.0) {  // not a descent direction; fall back
            for (size_t t = 0; t < nw; ++t) dir[t] = -g[t];
            slope = -gnorm;
        }
        double step = 1.0, fnew = f;
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            for (size_t t = 0; t < nw; ++t) wnew[t] = w[t] + step * dir[t];
            fnew = classifier_objective(xb, y, classes, l2, wnew, gnew);
            if (fnew <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        std::vector<double> s_vec(nw), y_vec(nw);
        double sy = 0.0;
        for (size_t t = 0; t < nw; ++t) {
            s_vec[t] = wnew[t] - w[t];
            y_vec[t] = gnew[t] - g[t];
            sy += s_vec[t] * y_vec[t];
        }
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > hist_cap) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        w = wnew;
        g = gnew;
        f = fnew;
    }

    ClassifierModel model;
    model.classes = classes;
    model.w = Tensor(xb.cols, classes, std::move(w));
    return model;
}

std::vector<int> classify(const ClassifierModel& model, const Tensor& z) {
    if (z.cols + 1 != model.w.rows) throw ShapeError("classify: feature width mismatch");
    std::vector<int> out(z.rows);
    for (int i = 0; i < z.rows; ++i) {
        int arg = 0;
        double best = -1e300;
        for (int c = 0; c < model.classes; ++c) {
            double acc = model.w.at(z.cols, c);
            for (int t = 0; t < z.cols; ++t) acc += z.at(i, t) * model.w.at(t, c);
            if (acc > best) {
                best = acc;
                arg = c;
            }
        }
        out[i] = arg;
    }
    return out;
}

std::pair<double, double> f1_scores(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) throw ArgumentError("f1_scores: length mismatch");
    std::unordered_map<int, int> classes;
    for (int v : pred) classes.emplace(v, static_cast<int>(classes.size()));
    for (int v : truth) classes.emplace(v, static_cast<int>(classes.size()));
    const int k = static_cast<int>(classes.size());
    std::vector<double> tp(k, 0.0), fp(k, 0.0), fn(k, 0.0);
    for (size_t i = 0; i < pred.size(); ++i) {
        int p = classes[pred[i]], t = classes[truth[i]];
        if (p == t)
            tp[p] += 1.0;
        else {
            fp[p] += 1.0;
            fn[t] += 1.0;
        }
    }
    double stp = 0.0, sfp = 0.0, sfn = 0.0, macro = 0.0;
    for (int c = 0; c < k; ++c) {
        stp += tp[c];
        sfp += fp[c];
        sfn += fn[c];
        const double denom = 2.0 * tp[c] + fp[c] + fn[c];
        macro += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
    }
    const double micro_denom = 2.0 * stp + sfp + sfn;
    const double micro = micro_denom > 0.0 ? 2.0 * stp / micro_denom : 0.0;
    return {micro, k > 0 ? macro / k : 0.0};
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(const std::vector<int>& y,
                                                               double train_frac,
                                                               std::uint64_t seed) {
    if (train_frac <= 0.0 || train_frac >= 1.0)
        throw ArgumentError("stratified_split: train_frac must be in (0,1)");
    std::unordered_map<int, std::vector<int>> by_class;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0) throw ArgumentError("stratified_split: negative label");
        by_class[y[i]].push_back(static_cast<int>(i));
    }
    std::vector<int> keys;
    for (const auto& [label, idx] : by_class) keys.push_back(label);
    std::sort(keys.begin(), keys.end());
    std::vector<int> train, test;
    for (int label : keys) {
        auto idx = by_class[label];
        Rng rng(hash_combine(seed, static_cast<std::uint64_t>(label)));
        for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
            std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
        int ntrain = std::max(1, static_cast<int>(std::floor(train_frac * idx.size() + 1e-12)));
        for (size_t i = 0; i < idx.size(); ++i)
            (static_cast<int>(i) < ntrain ? train : test).push_back(idx[i]);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

}  // namespace hinforge
