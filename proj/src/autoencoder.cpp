#include "vbdp/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace vbdp {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

struct LayerOffsets {
    std::vector<size_t> w, b;
};

LayerOffsets layer_offsets(const std::vector<int>& widths, size_t base = 0) {
    LayerOffsets off;
    size_t pos = base;
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        off.w.push_back(pos);
        pos += static_cast<size_t>(widths[l]) * widths[l + 1];
        off.b.push_back(pos);
        pos += static_cast<size_t>(widths[l + 1]);
    }
    return off;
}

// forward through a dense stack; `sigmoid_last` selects the output activation,
// hidden layers are relu. Returns activations per layer (act[0] = input).
std::vector<Vector> stack_forward(const std::vector<int>& widths, const Vector& params,
                                  const LayerOffsets& off, const Vector& x, bool sigmoid_last,
                                  std::vector<Vector>* preacts = nullptr) {
    std::vector<Vector> act(widths.size());
    act[0] = x;
    if (preacts) preacts->assign(widths.size() - 1, {});
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        const int in = widths[l], out = widths[l + 1];
        Vector pre(static_cast<size_t>(out));
        for (int r = 0; r < out; ++r) {
            double s = params[off.b[l] + static_cast<size_t>(r)];
            const size_t row = off.w[l] + static_cast<size_t>(r) * in;
            for (int c = 0; c < in; ++c)
                s += params[row + static_cast<size_t>(c)] * act[l][static_cast<size_t>(c)];
            pre[static_cast<size_t>(r)] = s;
        }
        const bool last = (l + 2 == widths.size());
        act[l + 1].resize(static_cast<size_t>(out));
        for (int r = 0; r < out; ++r) {
            double z = pre[static_cast<size_t>(r)];
            act[l + 1][static_cast<size_t>(r)] = (last && sigmoid_last) ? sigmoid(z) : std::max(0.0, z);
        }
        if (preacts) (*preacts)[l] = std::move(pre);
    }
    return act;
}

// backprop a delta at the stack output down to the stack input; accumulates
// weight/bias gradients into `grad`. Returns the delta at the input.
Vector stack_backward(const std::vector<int>& widths, const Vector& params,
                      const LayerOffsets& off, const std::vector<Vector>& act,
                      const std::vector<Vector>& pre, bool sigmoid_last, Vector delta,
                      Vector& grad) {
    const size_t layers = widths.size() - 1;
    for (size_t l = layers; l-- > 0;) {
        const int in = widths[l], out = widths[l + 1];
        const bool last = (l + 1 == layers);
        for (int r = 0; r < out; ++r) {
            double z = pre[l][static_cast<size_t>(r)];
            double dact = (last && sigmoid_last) ? sigmoid(z) * (1.0 - sigmoid(z))
                                                 : (z > 0 ? 1.0 : 0.0);
            delta[static_cast<size_t>(r)] *= dact;
        }
        for (int r = 0; r < out; ++r) {
            const size_t row = off.w[l] + static_cast<size_t>(r) * in;
            for (int c = 0; c < in; ++c)
                grad[row + static_cast<size_t>(c)] +=
                    delta[static_cast<size_t>(r)] * act[l][static_cast<size_t>(c)];
            grad[off.b[l] + static_cast<size_t>(r)] += delta[static_cast<size_t>(r)];
        }
        if (l == 0) {
            Vector din(static_cast<size_t>(in), 0.0);
            for (int c = 0; c < in; ++c)
                for (int r = 0; r < out; ++r)
                    din[static_cast<size_t>(c)] +=
                        params[off.w[l] + static_cast<size_t>(r) * in + static_cast<size_t>(c)] *
                        delta[static_cast<size_t>(r)];
            return din;
        }
        Vector prev(static_cast<size_t>(in), 0.0);
        for (int c = 0; c < in; ++c)
            for (int r = 0; r < out; ++r)
                prev[static_cast<size_t>(c)] +=
                    params[off.w[l] + static_cast<size_t>(r) * in + static_cast<size_t>(c)] *
                    delta[static_cast<size_t>(r)];
        delta = std::move(prev);
    }
    return delta;  // unreachable
}

Vector init_params(size_t count, const std::vector<int>& widths, uint64_t seed) {
    Vector params(count, 0.0);
    Rng rng(derive_seed(seed, "init", 0));
    LayerOffsets off = layer_offsets(widths);
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        double scale = 1.0 / std::sqrt(static_cast<double>(widths[l]));
        size_t wn = static_cast<size_t>(widths[l]) * widths[l + 1];
        for (size_t i = 0; i < wn; ++i) params[off.w[l] + i] = rng.uniform(-scale, scale);
    }
    return params;
}

void check_unit_interval(const Matrix& data) {
    for (const auto& row : data)
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("training data must lie in [0,1]");
}

std::vector<std::vector<size_t>> make_batches(size_t n, int batch_size, Rng& rng) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<size_t>> batches;
    for (size_t start = 0; start < n; start += static_cast<size_t>(batch_size)) {
        size_t end = std::min(n, start + static_cast<size_t>(batch_size));
        batches.emplace_back(order.begin() + static_cast<long>(start),
                             order.begin() + static_cast<long>(end));
    }
    return batches;
}

}  // namespace

void AEArchitecture::validate() const {
    if (layer_sizes.size() < 3) throw std::invalid_argument("architecture: need >= 3 layers");
    for (int w : layer_sizes)
        if (w < 1) throw std::invalid_argument("architecture: widths must be positive");
    const size_t n = layer_sizes.size();
    for (size_t i = 0; i < n; ++i)
        if (layer_sizes[i] != layer_sizes[n - 1 - i])
            throw std::invalid_argument("architecture: not palindromic around the bottleneck");
    const size_t mid = bottleneck_index();
    for (size_t i = 0; i < n; ++i)
        if (i != mid && layer_sizes[i] <= layer_sizes[mid])
            throw std::invalid_argument("architecture: bottleneck must be the unique minimum");
}

size_t AEArchitecture::bottleneck_index() const {
    return static_cast<size_t>(std::min_element(layer_sizes.begin(), layer_sizes.end()) -
                               layer_sizes.begin());
}

int AEArchitecture::bottleneck_width() const { return layer_sizes[bottleneck_index()]; }

namespace detail {

size_t ae_param_count(const std::vector<int>& layer_sizes) {
    size_t n = 0;
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        n += static_cast<size_t>(layer_sizes[l]) * layer_sizes[l + 1] + layer_sizes[l + 1];
    return n;
}

std::pair<double, Vector> ae_loss_grad(const std::vector<int>& layer_sizes, const Vector& params,
                                       const Matrix& X) {
    if (params.size() != ae_param_count(layer_sizes))
        throw std::invalid_argument("ae_loss_grad: parameter count mismatch");
    const size_t n = X.size();
    const size_t d = static_cast<size_t>(layer_sizes.front());
    LayerOffsets off = layer_offsets(layer_sizes);
    Vector grad(params.size(), 0.0);
    double loss = 0;
    for (const auto& x : X) {
        if (x.size() != d) throw std::invalid_argument("ae_loss_grad: dimension mismatch");
        std::vector<Vector> pre;
        auto act = stack_forward(layer_sizes, params, off, x, /*sigmoid_last=*/true, &pre);
        const Vector& out = act.back();
        Vector delta(d);
        for (size_t j = 0; j < d; ++j) {
            double diff = out[j] - x[j];
            loss += diff * diff / static_cast<double>(d);
            delta[j] = 2.0 * diff / static_cast<double>(d * n);
        }
        stack_backward(layer_sizes, params, off, act, pre, true, std::move(delta), grad);
    }
    return {loss / static_cast<double>(n), grad};
}

size_t vae_param_count(const std::vector<int>& enc_widths, int latent_dim) {
    size_t n = 0;
    for (size_t l = 0; l + 1 < enc_widths.size(); ++l)
        n += static_cast<size_t>(enc_widths[l]) * enc_widths[l + 1] + enc_widths[l + 1];
    // two heads
    n += 2 * (static_cast<size_t>(enc_widths.back()) * latent_dim + latent_dim);
    // decoder mirrors the encoder
    std::vector<int> dec(enc_widths.rbegin(), enc_widths.rend());
    n += static_cast<size_t>(latent_dim) * dec.front() + dec.front();
    for (size_t l = 0; l + 1 < dec.size(); ++l)
        n += static_cast<size_t>(dec[l]) * dec[l + 1] + dec[l + 1];
    return n;
}

// parameter layout: encoder hidden stack | mean head | logvar head | decoder
struct VaeLayout {
    std::vector<int> enc, dec;        // stack widths incl. endpoints
    LayerOffsets enc_off, dec_off;
    size_t mu_w, mu_b, lv_w, lv_b;
    int latent;
};

static VaeLayout vae_layout(const std::vector<int>& enc_widths, int latent_dim) {
    VaeLayout lo;
    lo.latent = latent_dim;
    lo.enc = enc_widths;
    lo.enc_off = layer_offsets(lo.enc);
    size_t pos = 0;
    for (size_t l = 0; l + 1 < lo.enc.size(); ++l)
        pos += static_cast<size_t>(lo.enc[l]) * lo.enc[l + 1] + lo.enc[l + 1];
    const size_t h = static_cast<size_t>(lo.enc.back());
    lo.mu_w = pos;
    lo.mu_b = pos + h * static_cast<size_t>(latent_dim);
    pos = lo.mu_b + static_cast<size_t>(latent_dim);
    lo.lv_w = pos;
    lo.lv_b = pos + h * static_cast<size_t>(latent_dim);
    pos = lo.lv_b + static_cast<size_t>(latent_dim);
    lo.dec.assign(enc_widths.rbegin(), enc_widths.rend());
    lo.dec.insert(lo.dec.begin(), latent_dim);
    lo.dec_off = layer_offsets(lo.dec, pos);
    return lo;
}

std::pair<double, Vector> vae_loss_grad(const std::vector<int>& enc_widths, int latent_dim,
                                        const Vector& params, const Matrix& X,
                                        const Matrix& noise) {
    if (params.size() != vae_param_count(enc_widths, latent_dim))
        throw std::invalid_argument("vae_loss_grad: parameter count mismatch");
    if (noise.size() != X.size())
        throw std::invalid_argument("vae_loss_grad: noise/batch size mismatch");
    const VaeLayout lo = vae_layout(enc_widths, latent_dim);
    const size_t L = static_cast<size_t>(latent_dim);
    const size_t h = static_cast<size_t>(lo.enc.back());
    const size_t n = X.size();

    Vector grad(params.size(), 0.0);
    double loss = 0;

    for (size_t i = 0; i < n; ++i) {
        const Vector& x = X[i];
        const Vector& eps = noise[i];
        if (eps.size() != L) throw std::invalid_argument("vae_loss_grad: noise dimension mismatch");

        std::vector<Vector> enc_pre;
        auto enc_act = stack_forward(lo.enc, params, lo.enc_off, x, /*sigmoid_last=*/false, &enc_pre);
        const Vector& hid = enc_act.back();

        Vector mu(L), logvar(L), z(L);
        for (size_t r = 0; r < L; ++r) {
            double sm = params[lo.mu_b + r], sv = params[lo.lv_b + r];
            for (size_t c = 0; c < h; ++c) {
                sm += params[lo.mu_w + r * h + c] * hid[c];
                sv += params[lo.lv_w + r * h + c] * hid[c];
            }
            mu[r] = sm;
            logvar[r] = sv;
            z[r] = mu[r] + std::exp(0.5 * logvar[r]) * eps[r];
        }

        std::vector<Vector> dec_pre;
        auto dec_act = stack_forward(lo.dec, params, lo.dec_off, z, /*sigmoid_last=*/true, &dec_pre);
        const Vector& out = dec_act.back();

        double rec = 0;
        Vector delta(out.size());
        for (size_t j = 0; j < out.size(); ++j) {
            double diff = out[j] - x[j];
            rec += diff * diff;
            delta[j] = 2.0 * diff / static_cast<double>(n);
        }
        loss += (rec + gaussian_kl(mu, logvar)) / static_cast<double>(n);

        Vector dz = stack_backward(lo.dec, params, lo.dec_off, dec_act, dec_pre, true,
                                   std::move(delta), grad);

        Vector dmu(L), dlv(L);
        for (size_t r = 0; r < L; ++r) {
            dmu[r] = dz[r] + mu[r] / static_cast<double>(n);
            dlv[r] = dz[r] * eps[r] * 0.5 * std::exp(0.5 * logvar[r]) +
                     0.5 * (std::exp(logvar[r]) - 1.0) / static_cast<double>(n);
        }
        // heads
        Vector dhid(h, 0.0);
        for (size_t r = 0; r < L; ++r) {
            for (size_t c = 0; c < h; ++c) {
                grad[lo.mu_w + r * h + c] += dmu[r] * hid[c];
                grad[lo.lv_w + r * h + c] += dlv[r] * hid[c];
                dhid[c] += params[lo.mu_w + r * h + c] * dmu[r] +
                           params[lo.lv_w + r * h + c] * dlv[r];
            }
            grad[lo.mu_b + r] += dmu[r];
            grad[lo.lv_b + r] += dlv[r];
        }
        if (lo.enc.size() > 1)
            stack_backward(lo.enc, params, lo.enc_off, enc_act, enc_pre, false, std::move(dhid),
                           grad);
    }
    return {loss, grad};
}

}  // namespace detail

AEModel::AEModel(AEArchitecture arch, const Vector& flat_params)
    : arch_(std::move(arch)), params_(flat_params) {
    arch_.validate();
    if (params_.size() != detail::ae_param_count(arch_.layer_sizes))
        throw std::invalid_argument("AEModel: parameter count mismatch");
}

Vector AEModel::forward(const Vector& x) const {
    if (x.size() != arch_.input_dim()) throw std::invalid_argument("forward: dimension mismatch");
    LayerOffsets off = layer_offsets(arch_.layer_sizes);
    return stack_forward(arch_.layer_sizes, params_, off, x, true).back();
}

Vector AEModel::encode(const Vector& x) const {
    if (x.size() != arch_.input_dim()) throw std::invalid_argument("encode: dimension mismatch");
    LayerOffsets off = layer_offsets(arch_.layer_sizes);
    auto act = stack_forward(arch_.layer_sizes, params_, off, x, true);
    return act[arch_.bottleneck_index()];
}

Vector AEModel::decode(const Vector& b) const {
    const size_t mid = arch_.bottleneck_index();
    if (b.size() != static_cast<size_t>(arch_.layer_sizes[mid]))
        throw std::invalid_argument("decode: dimension mismatch");
    std::vector<int> dec(arch_.layer_sizes.begin() + static_cast<long>(mid),
                         arch_.layer_sizes.end());
    // reuse the tail of the full parameter vector
    LayerOffsets full = layer_offsets(arch_.layer_sizes);
    LayerOffsets tail;
    for (size_t l = mid; l + 1 < arch_.layer_sizes.size(); ++l) {
        tail.w.push_back(full.w[l]);
        tail.b.push_back(full.b[l]);
    }
    return stack_forward(dec, params_, tail, b, true).back();
}

std::pair<AEModel, TrainReport> train_ae(const Matrix& data, const AEArchitecture& arch,
                                         const AETrainConfig& config) {
    arch.validate();
    if (data.size() < 2) throw std::invalid_argument("train_ae: need >= 2 instances");
    if (data[0].size() != arch.input_dim())
        throw std::invalid_argument("train_ae: architecture/input mismatch");
    check_unit_interval(data);
    if (config.epochs < 1 || config.learning_rate <= 0 || config.batch_size < 1)
        throw std::invalid_argument("train_ae: bad training config");
    if (config.validation_fraction < 0 || config.validation_fraction >= 1)
        throw std::invalid_argument("train_ae: validation fraction must be in [0,1)");

    // deterministic held-out split
    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(derive_seed(config.seed, "val_split", 0));
    split_rng.shuffle(order);
    size_t n_val = static_cast<size_t>(config.validation_fraction * static_cast<double>(data.size()));
    n_val = std::min(n_val, data.size() - 1);
    Matrix val, train;
    for (size_t i = 0; i < order.size(); ++i)
        (i < n_val ? val : train).push_back(data[order[i]]);

    Vector params = init_params(detail::ae_param_count(arch.layer_sizes), arch.layer_sizes,
                                config.seed);
    Rng batch_rng(derive_seed(config.seed, "batches", 0));
    TrainReport report;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& batch : make_batches(train.size(), config.batch_size, batch_rng)) {
            Matrix bx;
            bx.reserve(batch.size());
            for (size_t idx : batch) bx.push_back(train[idx]);
            auto [loss, grad] = detail::ae_loss_grad(arch.layer_sizes, params, bx);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_ae: non-finite loss at epoch " +
                                         std::to_string(epoch));
            for (size_t i = 0; i < params.size(); ++i)
                params[i] -= config.learning_rate * grad[i];
        }
        report.train_loss.push_back(detail::ae_loss_grad(arch.layer_sizes, params, train).first);
        report.val_loss.push_back(
            val.empty() ? report.train_loss.back()
                        : detail::ae_loss_grad(arch.layer_sizes, params, val).first);
    }
    return {AEModel(arch, params), std::move(report)};
}

double reconstruction_error(const AEModel& model, const Vector& x) {
    Vector out = model.forward(x);
    double s = 0;
    for (size_t j = 0; j < x.size(); ++j) {
        double diff = out[j] - x[j];
        s += diff * diff;
    }
    return s / static_cast<double>(x.size());
}

std::pair<Vector, Vector> reconstruct_halves(const AEModel& model, const Vector& v) {
    if (v.size() % 2 != 0) throw std::invalid_argument("reconstruct_halves: odd input dimension");
    Vector out = model.forward(v);
    const size_t d = out.size() / 2;
    return {Vector(out.begin(), out.begin() + static_cast<long>(d)),
            Vector(out.begin() + static_cast<long>(d), out.end())};
}

double grad_check(const AEArchitecture& arch, const Matrix& batch, double epsilon) {
    arch.validate();
    Vector params = init_params(detail::ae_param_count(arch.layer_sizes), arch.layer_sizes, 42);
    auto [loss, analytic] = detail::ae_loss_grad(arch.layer_sizes, params, batch);
    (void)loss;
    double worst = 0;
    for (size_t i = 0; i < params.size(); ++i) {
        Vector p = params;
        p[i] += epsilon;
        double up = detail::ae_loss_grad(arch.layer_sizes, p, batch).first;
        p[i] -= 2 * epsilon;
        double down = detail::ae_loss_grad(arch.layer_sizes, p, batch).first;
        double numeric = (up - down) / (2 * epsilon);
        double rel = std::abs(analytic[i] - numeric) /
                     std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
        worst = std::max(worst, rel);
    }
    return worst;
}

void save_report_csv(const std::string& path, const TrainReport& report,
                     const std::string& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    if (!metadata.empty()) out << "# " << metadata << "\n";
    out << "epoch,train_loss,val_loss\n";
    for (size_t e = 0; e < report.train_loss.size(); ++e)
        out << e << ',' << report.train_loss[e] << ',' << report.val_loss[e] << "\n";
}

double gaussian_kl(const Vector& mu, const Vector& logvar) {
    if (mu.size() != logvar.size()) throw std::invalid_argument("gaussian_kl: size mismatch");
    double kl = 0;
    for (size_t i = 0; i < mu.size(); ++i)
        kl += 0.5 * (mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i]);
    return kl;
}

VAEModel::VAEModel(std::vector<int> encoder_widths, int latent_dim, const Vector& flat_params)
    : enc_widths_(std::move(encoder_widths)), latent_(latent_dim), params_(flat_params) {
    if (params_.size() != detail::vae_param_count(enc_widths_, latent_))
        throw std::invalid_argument("VAEModel: parameter count mismatch");
}

std::pair<Vector, Vector> VAEModel::encode(const Vector& x) const {
    if (x.size() != static_cast<size_t>(enc_widths_.front()))
        throw std::invalid_argument("encode: dimension mismatch");
    const auto lo = detail::vae_layout(enc_widths_, latent_);
    auto act = stack_forward(lo.enc, params_, lo.enc_off, x, false);
    const Vector& hid = act.back();
    const size_t h = hid.size(), L = static_cast<size_t>(latent_);
    Vector mu(L), logvar(L);
    for (size_t r = 0; r < L; ++r) {
        double sm = params_[lo.mu_b + r], sv = params_[lo.lv_b + r];
        for (size_t c = 0; c < h; ++c) {
            sm += params_[lo.mu_w + r * h + c] * hid[c];
            sv += params_[lo.lv_w + r * h + c] * hid[c];
        }
        mu[r] = sm;
        logvar[r] = sv;
    }
    return {mu, logvar};
}

Vector VAEModel::decode(const Vector& z) const {
    if (z.size() != static_cast<size_t>(latent_))
        throw std::invalid_argument("decode: dimension mismatch");
    const auto lo = detail::vae_layout(enc_widths_, latent_);
    return stack_forward(lo.dec, params_, lo.dec_off, z, true).back();
}

std::pair<VAEModel, TrainReport> train_vae(const Matrix& data, const AEArchitecture& arch,
                                           const AETrainConfig& config) {
    arch.validate();
    if (data.size() < 2) throw std::invalid_argument("train_vae: need >= 2 instances");
    if (data[0].size() != arch.input_dim())
        throw std::invalid_argument("train_vae: architecture/input mismatch");
    check_unit_interval(data);

    const size_t mid = arch.bottleneck_index();
    std::vector<int> enc(arch.layer_sizes.begin(), arch.layer_sizes.begin() + static_cast<long>(mid));
    const int latent = arch.bottleneck_width();

    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(derive_seed(config.seed, "val_split", 0));
    split_rng.shuffle(order);
    size_t n_val = static_cast<size_t>(config.validation_fraction * static_cast<double>(data.size()));
    n_val = std::min(n_val, data.size() - 1);
    Matrix val, train;
    for (size_t i = 0; i < order.size(); ++i)
        (i < n_val ? val : train).push_back(data[order[i]]);

    Vector params(detail::vae_param_count(enc, latent), 0.0);
    {
        // uniform fan-in init over the whole flat vector, biases left at zero
        // via the same layout the loss uses
        Rng rng(derive_seed(config.seed, "init", 0));
        const auto lo = detail::vae_layout(enc, latent);
        auto init_block = [&](size_t w_off, size_t rows, size_t cols) {
            double scale = 1.0 / std::sqrt(static_cast<double>(cols));
            for (size_t i = 0; i < rows * cols; ++i) params[w_off + i] = rng.uniform(-scale, scale);
        };
        for (size_t l = 0; l + 1 < lo.enc.size(); ++l)
            init_block(lo.enc_off.w[l], static_cast<size_t>(lo.enc[l + 1]),
                       static_cast<size_t>(lo.enc[l]));
        init_block(lo.mu_w, static_cast<size_t>(latent), static_cast<size_t>(lo.enc.back()));
        init_block(lo.lv_w, static_cast<size_t>(latent), static_cast<size_t>(lo.enc.back()));
        for (size_t l = 0; l + 1 < lo.dec.size(); ++l)
            init_block(lo.dec_off.w[l], static_cast<size_t>(lo.dec[l + 1]),
                       static_cast<size_t>(lo.dec[l]));
    }

    Rng batch_rng(derive_seed(config.seed, "batches", 0));
    Rng noise_rng(derive_seed(config.seed, "noise", 0));
    auto draw_noise = [latent](Rng& rng, size_t rows) {
        Matrix noise(rows, Vector(static_cast<size_t>(latent)));
        for (auto& row : noise)
            for (auto& v : row) v = rng.gaussian();
        return noise;
    };

    TrainReport report;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& batch : make_batches(train.size(), config.batch_size, batch_rng)) {
            Matrix bx;
            bx.reserve(batch.size());
            for (size_t idx : batch) bx.push_back(train[idx]);
            auto [loss, grad] =
                detail::vae_loss_grad(enc, latent, params, bx, draw_noise(noise_rng, bx.size()));
            if (!std::isfinite(loss))
                throw std::runtime_error("train_vae: non-finite loss at epoch " +
                                         std::to_string(epoch));
            for (size_t i = 0; i < params.size(); ++i)
                params[i] -= config.learning_rate * grad[i];
        }
        Rng eval_rng(derive_seed(config.seed, "eval_noise", static_cast<uint64_t>(epoch)));
        report.train_loss.push_back(
            detail::vae_loss_grad(enc, latent, params, train, draw_noise(eval_rng, train.size()))
                .first);
        report.val_loss.push_back(
            val.empty() ? report.train_loss.back()
                        : detail::vae_loss_grad(enc, latent, params, val,
                                                draw_noise(eval_rng, val.size()))
                              .first);
    }
    VAEModel model;
    model.enc_widths_ = enc;
    model.latent_ = latent;
    model.params_ = std::move(params);
    return {std::move(model), std::move(report)};
}

std::string AEModel::to_json() const {
    nlohmann::json j;
    j["kind"] = "autoencoder";
    j["layer_sizes"] = arch_.layer_sizes;
    j["params"] = params_;
    return j.dump(2);
}

AEModel AEModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("kind").get<std::string>() != "autoencoder")
        throw std::invalid_argument("AEModel::from_json: wrong kind");
    AEArchitecture arch{j.at("layer_sizes").get<std::vector<int>>()};
    return AEModel(arch, j.at("params").get<Vector>());
}

}  // namespace vbdp
