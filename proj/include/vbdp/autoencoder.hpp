#pragma once

#include <string>
#include <utility>

#include "vbdp/common.hpp"

namespace vbdp {

// Symmetric dense architecture, e.g. 9,6,4,3,4,6,9. Hidden layers are relu,
// the output layer sigmoid.
struct AEArchitecture {
    std::vector<int> layer_sizes;

    void validate() const;  // palindromic, first = last = input dim, unique bottleneck
    size_t input_dim() const { return static_cast<size_t>(layer_sizes.front()); }
    size_t bottleneck_index() const;
    int bottleneck_width() const;
};

struct AETrainConfig {
    int epochs = 100;
    double learning_rate = 0.05;
    int batch_size = 32;
    uint64_t seed = 0;
    double validation_fraction = 0.2;
};

struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
};

class AEModel {
public:
    AEModel() = default;
    AEModel(AEArchitecture arch, const Vector& flat_params);

    const AEArchitecture& architecture() const { return arch_; }
    const Vector& params() const { return params_; }

    Vector forward(const Vector& x) const;
    Vector encode(const Vector& x) const;   // activations at the bottleneck
    Vector decode(const Vector& b) const;   // bottleneck -> output

    std::string to_json() const;
    static AEModel from_json(const std::string& text);

private:
    AEArchitecture arch_;
    Vector params_;
};

std::pair<AEModel, TrainReport> train_ae(const Matrix& data, const AEArchitecture& arch,
                                         const AETrainConfig& config);

double reconstruction_error(const AEModel& model, const Vector& x);

// Forward pass of a c=2 virtual vector, split at the midpoint.
std::pair<Vector, Vector> reconstruct_halves(const AEModel& model, const Vector& v);

// Max relative error between analytic backprop and central finite differences
// on a random tiny instance of the given architecture.
double grad_check(const AEArchitecture& arch, const Matrix& batch, double epsilon);

void save_report_csv(const std::string& path, const TrainReport& report,
                     const std::string& metadata = "");

// --- VAE ---

class VAEModel {
public:
    VAEModel() = default;
    VAEModel(std::vector<int> encoder_widths, int latent_dim, const Vector& flat_params);

    int latent_dim() const { return latent_; }
    const Vector& params() const { return params_; }
    const std::vector<int>& encoder_widths() const { return enc_widths_; }

    // (mean, log-variance) of q(z | x)
    std::pair<Vector, Vector> encode(const Vector& x) const;
    Vector decode(const Vector& z) const;

private:
    friend std::pair<VAEModel, TrainReport> train_vae(const Matrix&, const AEArchitecture&,
                                                      const AETrainConfig&);
    std::vector<int> enc_widths_;  // input + hidden widths before the heads
    int latent_ = 0;
    Vector params_;
};

// Latent dimension is the architecture's bottleneck width; encoder/decoder
// reuse its hidden stack. Loss = squared reconstruction error + closed-form
// Gaussian KL to the standard normal prior, via the reparameterization trick.
std::pair<VAEModel, TrainReport> train_vae(const Matrix& data, const AEArchitecture& arch,
                                           const AETrainConfig& config);

// Closed-form KL( N(mu, exp(logvar)) || N(0, I) ), summed over dimensions.
double gaussian_kl(const Vector& mu, const Vector& logvar);

namespace detail {

size_t ae_param_count(const std::vector<int>& layer_sizes);

// Mean-per-feature squared reconstruction loss and gradient for a flat
// parameter vector; shared by the trainer and the gradient checks.
std::pair<double, Vector> ae_loss_grad(const std::vector<int>& layer_sizes, const Vector& params,
                                       const Matrix& X);

size_t vae_param_count(const std::vector<int>& enc_widths, int latent_dim);

// VAE loss and gradient with the per-sample noise draws supplied explicitly so
// finite differences can hold them fixed.
std::pair<double, Vector> vae_loss_grad(const std::vector<int>& enc_widths, int latent_dim,
                                        const Vector& params, const Matrix& X,
                                        const Matrix& noise);

}  // namespace detail

}  // namespace vbdp
