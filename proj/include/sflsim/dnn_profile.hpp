#pragma once

#include <string>
#include <vector>

#include "sflsim/config.hpp"

namespace sflsim {

struct LayerEntry {
    int index = 0;               // 1-based, contiguous
    double flops_fwd_bwd = 0.0;  // FLOPs per sample, forward + backward
    double activation_bits = 0.0; // output size per sample
    double param_bits = 0.0;      // parameter size of this layer
};

enum class FeatureUpload { PerIteration, Once };

// Per-cut aggregate costs. c_device/c_server are FLOPs per device per
// round; m_feat is the feature traffic per device per round (bits);
// m_model is the UAV-side sub-model size (bits) shipped to the satellite.
struct CutCosts {
    double c_device = 0.0;
    double c_server = 0.0;
    double m_feat = 0.0;
    double m_model = 0.0;
};

struct DnnProfile {
    std::vector<LayerEntry> layers;
    int batch_size = 64;
    int local_iterations = 5; // E
    FeatureUpload features_per_round = FeatureUpload::PerIteration;
    double grad_multiplier = 2.0; // activations up + gradients down

    int num_layers() const { return static_cast<int>(layers.size()); }
    void validate() const;

    // AlexNet adapted to 32x32 CIFAR-10 inputs, frozen from the layer-shape
    // calculator (conv FLOPs = 2*k^2*C_in*C_out*H_out*W_out per sample,
    // fwd+bwd = 3x fwd, activations and parameters at 32 bits).
    static DnnProfile alexnet_cifar10();

    static DnnProfile from_string(const std::string& text, const std::string& origin);
    static DnnProfile from_file(const std::string& path);
    static DnnProfile from_config(const Config& cfg);
};

CutCosts cut(const DnnProfile& profile, int ell);

std::string save_profile(const DnnProfile& profile);

} // namespace sflsim
