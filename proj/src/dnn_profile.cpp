#include "sflsim/dnn_profile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sflsim/errors.hpp"
#include "sflsim/text.hpp"

namespace sflsim {

void DnnProfile::validate() const {
    if (layers.size() < 2) throw ConfigError("DNN profile needs at least two layers");
    if (batch_size < 1) throw ConfigError("DNN batch_size must be >= 1");
    if (local_iterations < 1) throw ConfigError("DNN local_iterations must be >= 1");
    if (grad_multiplier < 1.0) throw ConfigError("DNN grad_multiplier must be >= 1");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerEntry& e = layers[i];
        if (e.index != static_cast<int>(i) + 1)
            throw ConfigError("DNN layer indices must be contiguous from 1; entry " +
                              std::to_string(i) + " has index " + std::to_string(e.index));
        if (e.flops_fwd_bwd < 0 || e.activation_bits < 0 || e.param_bits < 0)
            throw ConfigError("DNN layer " + std::to_string(e.index) + " has a negative field");
    }
}

DnnProfile DnnProfile::alexnet_cifar10() {
    DnnProfile p;
    p.layers = {
        //     idx  flops_fwd_bwd  act_bits  param_bits
        {1, 2654208.0, 131072.0, 57344.0},      // conv1 3->64, pool
        {2, 42467328.0, 98304.0, 3545088.0},    // conv2 64->192, pool
        {3, 63700992.0, 196608.0, 21245952.0},  // conv3 192->384
        {4, 84934656.0, 131072.0, 28319744.0},  // conv4 384->256
        {5, 56623104.0, 32768.0, 18882560.0},   // conv5 256->256, pool
        {6, 25165824.0, 131072.0, 134348800.0}, // fc6 1024->4096
        {7, 100663296.0, 131072.0, 537001984.0}, // fc7 4096->4096
        {8, 245760.0, 320.0, 1311040.0},        // fc8 4096->10
    };
    p.validate();
    return p;
}

CutCosts cut(const DnnProfile& profile, int ell) {
    const int L = profile.num_layers();
    if (ell < 1 || ell > L)
        throw ConfigError("cut layer must be in [1, " + std::to_string(L) + "], got " +
                          std::to_string(ell));
    CutCosts out;
    const double per_round = static_cast<double>(profile.batch_size) * profile.local_iterations;
    for (int j = 1; j <= L; ++j) {
        const double f = profile.layers[j - 1].flops_fwd_bwd;
        if (j <= ell)
            out.c_device += per_round * f;
        else
            out.c_server += per_round * f;
    }
    double feat = static_cast<double>(profile.batch_size) *
                  profile.layers[ell - 1].activation_bits * profile.grad_multiplier;
    if (profile.features_per_round == FeatureUpload::PerIteration) feat *= profile.local_iterations;
    out.m_feat = feat;
    for (int j = ell + 1; j <= L; ++j) out.m_model += profile.layers[j - 1].param_bits;
    return out;
}

std::string save_profile(const DnnProfile& profile) {
    std::ostringstream out;
    out << "sflsim-dnn-profile v1\n";
    out << "# layer <index> <flops_fwd_bwd per sample> <activation bits per sample> <param bits>\n";
    out << "batch_size " << profile.batch_size << "\n";
    out << "local_iterations " << profile.local_iterations << "\n";
    out << "features_per_round "
        << (profile.features_per_round == FeatureUpload::PerIteration ? "per_iteration" : "once")
        << "\n";
    out << "grad_multiplier " << format_double(profile.grad_multiplier) << "\n";
    for (const auto& e : profile.layers)
        out << "layer " << e.index << " " << format_double(e.flops_fwd_bwd) << " "
            << format_double(e.activation_bits) << " " << format_double(e.param_bits) << "\n";
    return out.str();
}

DnnProfile DnnProfile::from_string(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    DnnProfile p;
    p.layers.clear();
    bool saw_header = false;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream row(line);
        std::string tag;
        row >> tag;
        if (!saw_header) {
            std::string version;
            row >> version;
            if (tag != "sflsim-dnn-profile" || version != "v1")
                fail("expected header 'sflsim-dnn-profile v1'");
            saw_header = true;
            continue;
        }
        if (tag == "batch_size") {
            if (!(row >> p.batch_size)) fail("batch_size needs an integer");
        } else if (tag == "local_iterations") {
            if (!(row >> p.local_iterations)) fail("local_iterations needs an integer");
        } else if (tag == "features_per_round") {
            std::string mode;
            row >> mode;
            if (mode == "per_iteration")
                p.features_per_round = FeatureUpload::PerIteration;
            else if (mode == "once")
                p.features_per_round = FeatureUpload::Once;
            else
                fail("features_per_round must be 'per_iteration' or 'once'");
        } else if (tag == "grad_multiplier") {
            if (!(row >> p.grad_multiplier)) fail("grad_multiplier needs a number");
        } else if (tag == "layer") {
            LayerEntry e;
            if (!(row >> e.index >> e.flops_fwd_bwd >> e.activation_bits >> e.param_bits))
                fail("layer record needs: index flops activation_bits param_bits");
            std::string extra;
            if (row >> extra) fail("trailing token '" + extra + "' on layer record");
            p.layers.push_back(e);
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    if (!saw_header) throw ConfigError(origin + ": empty profile file");
    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return p;
}

DnnProfile DnnProfile::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open DNN profile '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

DnnProfile DnnProfile::from_config(const Config& cfg) {
    const std::string which = cfg.get_string_or("dnn", "profile", "alexnet_cifar10");
    DnnProfile p;
    if (which == "alexnet_cifar10")
        p = alexnet_cifar10();
    else
        p = from_file(which);
    p.batch_size = static_cast<int>(cfg.get_int_or("dnn", "batch_size", p.batch_size));
    p.local_iterations =
        static_cast<int>(cfg.get_int_or("dnn", "local_iterations", p.local_iterations));
    const std::string mode = cfg.get_string_or(
        "dnn", "features_per_round",
        p.features_per_round == FeatureUpload::PerIteration ? "per_iteration" : "once");
    if (mode == "per_iteration")
        p.features_per_round = FeatureUpload::PerIteration;
    else if (mode == "once")
        p.features_per_round = FeatureUpload::Once;
    else
        throw ConfigError("dnn.features_per_round must be 'per_iteration' or 'once'");
    p.grad_multiplier = cfg.get_double_or("dnn", "grad_multiplier", p.grad_multiplier);
    p.validate();
    return p;
}

} // namespace sflsim
