#include "windcast/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "windcast/util/json_eigen.hpp"
#include "windcast/util/rng.hpp"

namespace windcast::flow {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct HalfSplit {
    int pass_begin, pass_size;
    int trans_begin, trans_size;
};

HalfSplit split_for(int dim, int parity) {
    const int m = dim / 2;
    if (parity == 0) return {0, m, m, dim - m};
    return {m, dim - m, 0, m};
}

Eigen::VectorXd net_input(const Eigen::VectorXd& vec, const HalfSplit& hs,
                          const Eigen::VectorXd& y_std) {
    Eigen::VectorXd in(hs.pass_size + y_std.size());
    in.head(hs.pass_size) = vec.segment(hs.pass_begin, hs.pass_size);
    in.tail(y_std.size()) = y_std;
    return in;
}

double soft_clamp(double raw, double c) { return c * std::tanh(raw / c); }

}  // namespace

FlowModel make_flow(pca::PcaModel pca_model, const Eigen::VectorXd& cond_mean,
                    const Eigen::VectorXd& cond_std, const FlowConfig& config,
                    std::uint64_t seed, bool zero_init) {
    if (cond_mean.size() != cond_std.size()) {
        throw DimensionMismatch("cond_mean / cond_std length mismatch");
    }
    if ((cond_std.array() <= 0).any()) {
        throw std::invalid_argument("cond_std entries must be positive");
    }
    FlowModel model;
    model.latent_dim = pca_model.latent_dim();
    model.cond_dim = static_cast<int>(cond_mean.size());
    model.pca = std::move(pca_model);
    model.cond_mean = cond_mean;
    model.cond_std = cond_std;

    rng::Rng r(rng::mix(seed, 0x666c6f77ULL));  // "flow"
    for (int l = 0; l < config.n_layers; ++l) {
        const HalfSplit hs = split_for(model.latent_dim, l % 2);
        std::vector<int> sizes;
        sizes.push_back(hs.pass_size + model.cond_dim);
        for (const int h : config.hidden) sizes.push_back(h);
        sizes.push_back(hs.trans_size);
        CouplingLayer layer;
        layer.parity = l % 2;
        layer.s_clamp = config.s_clamp;
        layer.s_net = neural::make_mlp(sizes, r, zero_init);
        layer.t_net = neural::make_mlp(sizes, r, zero_init);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

FlowModel init_for_dataset(const data::Dataset& dataset, double evr_target,
                           const FlowConfig& config, std::uint64_t seed) {
    const auto train_idx = dataset.indices(data::Split::Train);
    if (train_idx.size() < 2) throw std::invalid_argument("need at least 2 training days");
    Eigen::MatrixXd x(static_cast<int>(train_idx.size()), 96);
    Eigen::MatrixXd y(static_cast<int>(train_idx.size()), 24);
    for (size_t i = 0; i < train_idx.size(); ++i) {
        x.row(static_cast<int>(i)) =
            dataset.days[static_cast<size_t>(train_idx[i])].capacity.transpose();
        y.row(static_cast<int>(i)) =
            dataset.days[static_cast<size_t>(train_idx[i])].forecast.transpose();
    }
    pca::PcaModel p = pca::fit(x, evr_target);
    Eigen::VectorXd mean = y.colwise().mean();
    Eigen::VectorXd sd(24);
    for (int j = 0; j < 24; ++j) {
        const double var = (y.col(j).array() - mean(j)).square().sum() /
                           std::max<double>(1, y.rows() - 1);
        // zero-variance features carry no information; unit scale keeps the
        // invariant cond_std > 0
        sd(j) = var > 1e-16 ? std::sqrt(var) : 1.0;
    }
    return make_flow(std::move(p), mean, sd, config, seed);
}

Eigen::VectorXd standardize_condition(const FlowModel& model, const Eigen::VectorXd& y) {
    if (y.size() != model.cond_dim) {
        throw DimensionMismatch("condition length " + std::to_string(y.size()) + ", expected " +
                                std::to_string(model.cond_dim));
    }
    return ((y - model.cond_mean).array() / model.cond_std.array()).matrix();
}

LayerResult layer_forward(const CouplingLayer& layer, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& y_std) {
    const HalfSplit hs = split_for(static_cast<int>(u.size()), layer.parity);
    LayerResult out{u, 0.0};
    if (hs.trans_size == 0) return out;
    const Eigen::VectorXd in = net_input(u, hs, y_std);
    const Eigen::VectorXd s_raw = neural::forward(layer.s_net, in);
    const Eigen::VectorXd t = neural::forward(layer.t_net, in);
    for (int i = 0; i < hs.trans_size; ++i) {
        const double s = soft_clamp(s_raw(i), layer.s_clamp);
        out.value(hs.trans_begin + i) = u(hs.trans_begin + i) * std::exp(s) + t(i);
        out.log_det += s;
    }
    if (!out.value.allFinite() || !std::isfinite(out.log_det)) {
        throw NonFiniteOutput("coupling layer forward produced non-finite values");
    }
    return out;
}

LayerResult layer_inverse(const CouplingLayer& layer, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& y_std) {
    const HalfSplit hs = split_for(static_cast<int>(v.size()), layer.parity);
    LayerResult out{v, 0.0};
    if (hs.trans_size == 0) return out;
    const Eigen::VectorXd in = net_input(v, hs, y_std);
    const Eigen::VectorXd s_raw = neural::forward(layer.s_net, in);
    const Eigen::VectorXd t = neural::forward(layer.t_net, in);
    for (int i = 0; i < hs.trans_size; ++i) {
        const double s = soft_clamp(s_raw(i), layer.s_clamp);
        out.value(hs.trans_begin + i) = (v(hs.trans_begin + i) - t(i)) * std::exp(-s);
        out.log_det -= s;
    }
    if (!out.value.allFinite() || !std::isfinite(out.log_det)) {
        throw NonFiniteOutput("coupling layer inverse produced non-finite values");
    }
    return out;
}

Eigen::VectorXd forward_all(const FlowModel& model, const Eigen::VectorXd& z,
                            const Eigen::VectorXd& y, double* log_det) {
    if (z.size() != model.latent_dim) throw DimensionMismatch("latent length mismatch");
    const Eigen::VectorXd y_std = standardize_condition(model, y);
    Eigen::VectorXd h = z;
    double total = 0;
    for (const auto& layer : model.layers) {
        LayerResult r = layer_forward(layer, h, y_std);
        h = std::move(r.value);
        total += r.log_det;
    }
    if (log_det) *log_det = total;
    return h;
}

Eigen::VectorXd inverse_all(const FlowModel& model, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& y, double* log_det) {
    if (v.size() != model.latent_dim) throw DimensionMismatch("latent length mismatch");
    const Eigen::VectorXd y_std = standardize_condition(model, y);
    Eigen::VectorXd h = v;
    double total = 0;
    for (auto it = model.layers.rbegin(); it != model.layers.rend(); ++it) {
        LayerResult r = layer_inverse(*it, h, y_std);
        h = std::move(r.value);
        total += r.log_det;
    }
    if (log_det) *log_det = total;
    return h;
}

double log_prob(const FlowModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd u = pca::transform(model.pca, x);
    double log_det = 0;
    const Eigen::VectorXd z = inverse_all(model, u, y, &log_det);
    const double gauss = -0.5 * z.squaredNorm() - 0.5 * model.latent_dim * kLog2Pi;
    return gauss + log_det;
}

NllGradients nll_and_gradients(const FlowModel& model, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y) {
    const int n = static_cast<int>(x.rows());
    const int layers = static_cast<int>(model.layers.size());
    if (n == 0) throw std::invalid_argument("nll_and_gradients: empty batch");
    if (y.rows() != n) throw DimensionMismatch("x / y row count mismatch");

    NllGradients out;
    for (const auto& layer : model.layers) {
        out.s_nets.push_back(neural::zero_gradients(layer.s_net));
        out.t_nets.push_back(neural::zero_gradients(layer.t_net));
    }

    struct LayerCache {
        neural::ForwardCache s_cache, t_cache;
        Eigen::VectorXd s;       // clamped scale
        Eigen::VectorXd s_raw;
        Eigen::VectorXd u_trans;  // transformed half after inversion
    };

    double nll_sum = 0;
    std::vector<LayerCache> caches(static_cast<size_t>(layers));
    for (int r = 0; r < n; ++r) {
        const Eigen::VectorXd y_std = standardize_condition(model, y.row(r).transpose());
        Eigen::VectorXd h = pca::transform(model.pca, x.row(r).transpose());

        double s_total = 0;
        for (int l = layers - 1; l >= 0; --l) {
            const auto& layer = model.layers[static_cast<size_t>(l)];
            const HalfSplit hs = split_for(model.latent_dim, layer.parity);
            LayerCache& cache = caches[static_cast<size_t>(l)];
            if (hs.trans_size == 0) continue;
            const Eigen::VectorXd in = net_input(h, hs, y_std);
            const Eigen::VectorXd s_raw = neural::forward(layer.s_net, in, &cache.s_cache);
            const Eigen::VectorXd t = neural::forward(layer.t_net, in, &cache.t_cache);
            cache.s_raw = s_raw;
            cache.s = Eigen::VectorXd(hs.trans_size);
            cache.u_trans = Eigen::VectorXd(hs.trans_size);
            for (int i = 0; i < hs.trans_size; ++i) {
                const double s = soft_clamp(s_raw(i), layer.s_clamp);
                cache.s(i) = s;
                cache.u_trans(i) = (h(hs.trans_begin + i) - t(i)) * std::exp(-s);
                h(hs.trans_begin + i) = cache.u_trans(i);
                s_total += s;
            }
        }
        const double nll = 0.5 * h.squaredNorm() + 0.5 * model.latent_dim * kLog2Pi + s_total;
        if (!std::isfinite(nll)) throw DivergedLoss("NLL became non-finite");
        nll_sum += nll;

        // Backward through the inverse pass, earliest layer first.
        Eigen::VectorXd g = h;  // d(nll)/dz
        for (int l = 0; l < layers; ++l) {
            const auto& layer = model.layers[static_cast<size_t>(l)];
            const HalfSplit hs = split_for(model.latent_dim, layer.parity);
            if (hs.trans_size == 0) continue;
            LayerCache& cache = caches[static_cast<size_t>(l)];
            Eigen::VectorXd g_s(hs.trans_size), g_t(hs.trans_size), g_vt(hs.trans_size);
            for (int i = 0; i < hs.trans_size; ++i) {
                const double e = std::exp(-cache.s(i));
                const double gu = g(hs.trans_begin + i);
                g_s(i) = -gu * cache.u_trans(i) + 1.0;  // +1 from the log-det term
                g_t(i) = -gu * e;
                g_vt(i) = gu * e;
            }
            // through the smooth clamp
            for (int i = 0; i < hs.trans_size; ++i) {
                const double ratio = cache.s(i) / layer.s_clamp;
                g_s(i) *= 1.0 - ratio * ratio;
            }
            neural::Gradients gs = neural::backward(layer.s_net, cache.s_cache, g_s);
            neural::Gradients gt = neural::backward(layer.t_net, cache.t_cache, g_t);
            neural::accumulate(out.s_nets[static_cast<size_t>(l)], gs);
            neural::accumulate(out.t_nets[static_cast<size_t>(l)], gt);

            Eigen::VectorXd g_next = Eigen::VectorXd::Zero(model.latent_dim);
            g_next.segment(hs.trans_begin, hs.trans_size) = g_vt;
            g_next.segment(hs.pass_begin, hs.pass_size) =
                g.segment(hs.pass_begin, hs.pass_size) + gs.input.head(hs.pass_size) +
                gt.input.head(hs.pass_size);
            g = std::move(g_next);
        }
    }

    out.nll = nll_sum / n;
    const double inv_n = 1.0 / n;
    for (int l = 0; l < layers; ++l) {
        neural::scale(out.s_nets[static_cast<size_t>(l)], inv_n);
        neural::scale(out.t_nets[static_cast<size_t>(l)], inv_n);
    }
    return out;
}

std::vector<double> train(FlowModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                          const TrainOptions& options) {
    const int n = static_cast<int>(x.rows());
    if (n < 2) throw std::invalid_argument("train: need at least 2 samples");
    std::vector<double> trace;
    if (options.epochs <= 0) return trace;

    std::vector<neural::AdamState> s_adam, t_adam;
    for (auto& layer : model.layers) {
        s_adam.push_back(neural::make_adam(layer.s_net, options.learning_rate));
        t_adam.push_back(neural::make_adam(layer.t_net, options.learning_rate));
    }

    rng::Rng shuffle_rng(rng::mix(options.seed, 0x73687566ULL));
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const int batch = options.batch_size > 0 ? std::min(options.batch_size, n) : n;

    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        if (batch < n) {
            for (int i = n - 1; i > 0; --i) {
                const int j = static_cast<int>(shuffle_rng.uniform_index(
                    static_cast<std::uint64_t>(i + 1)));
                std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
            }
        }
        double epoch_nll = 0;
        int epoch_count = 0;
        for (int start = 0; start < n; start += batch) {
            const int count = std::min(batch, n - start);
            Eigen::MatrixXd xb(count, x.cols());
            Eigen::MatrixXd yb(count, y.cols());
            for (int i = 0; i < count; ++i) {
                xb.row(i) = x.row(order[static_cast<size_t>(start + i)]);
                yb.row(i) = y.row(order[static_cast<size_t>(start + i)]);
            }
            NllGradients g = nll_and_gradients(model, xb, yb);
            epoch_nll += g.nll * count;
            epoch_count += count;
            for (size_t l = 0; l < model.layers.size(); ++l) {
                neural::adam_step(model.layers[l].s_net, g.s_nets[l], s_adam[l]);
                neural::adam_step(model.layers[l].t_net, g.t_nets[l], t_adam[l]);
            }
        }
        epoch_nll /= epoch_count;
        if (!std::isfinite(epoch_nll)) throw DivergedLoss("training NLL became non-finite");
        trace.push_back(epoch_nll);

        if (epoch_nll < best - options.min_improvement) {
            best = epoch_nll;
            stale = 0;
        } else {
            if (++stale >= options.patience) break;
        }
    }
    return trace;
}

std::vector<double> train(FlowModel& model, const data::Dataset& dataset,
                          const TrainOptions& options) {
    const auto train_idx = dataset.indices(data::Split::Train);
    if (train_idx.size() < 2) throw std::invalid_argument("train: need at least 2 training days");
    Eigen::MatrixXd x(static_cast<int>(train_idx.size()), 96);
    Eigen::MatrixXd y(static_cast<int>(train_idx.size()), 24);
    for (size_t i = 0; i < train_idx.size(); ++i) {
        x.row(static_cast<int>(i)) =
            dataset.days[static_cast<size_t>(train_idx[i])].capacity.transpose();
        y.row(static_cast<int>(i)) =
            dataset.days[static_cast<size_t>(train_idx[i])].forecast.transpose();
    }
    return train(model, x, y, options);
}

Eigen::MatrixXd sample_matrix(const FlowModel& model, const Eigen::VectorXd& y, int n,
                              std::uint64_t seed, Post post) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    rng::Rng r(rng::mix(seed, 0x73616d70ULL));  // "samp"
    const int out_dim = model.pca.input_dim();
    Eigen::MatrixXd out(n, out_dim);
    const long max_attempts = 1000L * n + 1000;
    long attempts = 0;
    for (int i = 0; i < n; ++i) {
        for (;;) {
            if (++attempts > max_attempts) {
                throw std::runtime_error("rejection sampling exceeded attempt budget");
            }
            Eigen::VectorXd z(model.latent_dim);
            for (int k = 0; k < model.latent_dim; ++k) z(k) = r.normal();
            Eigen::VectorXd xs = pca::inverse_transform(model.pca, forward_all(model, z, y));
            if (post == Post::Reject &&
                ((xs.array() < 0.0).any() || (xs.array() > 1.0).any())) {
                continue;
            }
            if (post == Post::Clamp) xs = xs.cwiseMax(0.0).cwiseMin(1.0);
            out.row(i) = xs.transpose();
            break;
        }
    }
    return out;
}

data::ScenarioSet sample(const FlowModel& model, const Eigen::VectorXd& y, int n,
                         std::uint64_t seed, Post post) {
    data::ScenarioSet set;
    set.scenarios = sample_matrix(model, y, n, seed, post);
    set.source = data::Source::Flow;
    set.condition = y;
    return set;
}

nlohmann::json to_json(const FlowModel& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        layers.push_back(nlohmann::json{{"parity", layer.parity},
                                        {"s_clamp", layer.s_clamp},
                                        {"s_net", neural::to_json(layer.s_net)},
                                        {"t_net", neural::to_json(layer.t_net)}});
    }
    return nlohmann::json{{"format", "windcast-flow-v1"},
                          {"latent_dim", model.latent_dim},
                          {"cond_dim", model.cond_dim},
                          {"pca", pca::to_json(model.pca)},
                          {"cond_mean", util::vec_to_json(model.cond_mean)},
                          {"cond_std", util::vec_to_json(model.cond_std)},
                          {"layers", layers}};
}

FlowModel from_json(const nlohmann::json& j) {
    FlowModel model;
    model.latent_dim = j.at("latent_dim").get<int>();
    model.cond_dim = j.at("cond_dim").get<int>();
    model.pca = pca::from_json(j.at("pca"));
    model.cond_mean = util::vec_from_json(j.at("cond_mean"));
    model.cond_std = util::vec_from_json(j.at("cond_std"));
    for (const auto& jl : j.at("layers")) {
        CouplingLayer layer;
        layer.parity = jl.at("parity").get<int>();
        layer.s_clamp = jl.at("s_clamp").get<double>();
        layer.s_net = neural::mlp_from_json(jl.at("s_net"));
        layer.t_net = neural::mlp_from_json(jl.at("t_net"));
        model.layers.push_back(std::move(layer));
    }
    return model;
}

void save(const FlowModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(model).dump(1) << "\n";
}

FlowModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace windcast::flow
