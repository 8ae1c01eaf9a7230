#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "semsplat/frame.hpp"
#include "semsplat/geometry.hpp"
#include "semsplat/image.hpp"

namespace semsplat {

constexpr int kEmbedDim = 16;

// A single isotropic Gaussian, mostly for tests and debugging; the map
// itself stores structure-of-arrays.
struct Gaussian {
    Vec3 mu = Vec3::Zero();
    double r = 0.0;
    Vec3 color = Vec3::Zero();
    double opacity = 0.0;
    std::array<double, kEmbedDim> embed{};
};

// Per-parameter-group learning rates for the Adam updates.
struct MapLearningRates {
    double mu = 1e-4;
    double r = 1e-3;
    double color = 2.5e-3;
    double opacity = 5e-2;
    double embed = 2.5e-3;

    MapLearningRates scaled(double k) const {
        return MapLearningRates{mu * k, r * k, color * k, opacity * k, embed * k};
    }
};

struct DensifyOptions {
    double tau_sil_add = 0.5;  // pixels with Sil below this count as uncovered
    int stride = 1;
    // When true, insertion happens at every mapping keyframe; when false,
    // only keyframes whose covered fraction drops below overlap_trigger
    // initiate insertion.
    bool per_keyframe_insertion = true;
    double overlap_trigger = 0.5;
};

struct GradientBuffer;  // defined in rasterizer.hpp

// Growable structure-of-arrays of isotropic semantic Gaussians. Parameters
// are stored as float32 (the serialized format); optimizer math runs in
// double and rounds back on write.
class GaussianMap {
public:
    size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    // Parallel field arrays.
    const std::vector<float>& mu() const { return mu_; }
    const std::vector<float>& radius() const { return r_; }
    const std::vector<float>& color() const { return color_; }
    const std::vector<float>& opacity() const { return opacity_; }
    const std::vector<float>& embed() const { return embed_; }

    Vec3 mu_at(size_t i) const { return Vec3(mu_[3 * i], mu_[3 * i + 1], mu_[3 * i + 2]); }
    double radius_at(size_t i) const { return r_[i]; }
    Vec3 color_at(size_t i) const {
        return Vec3(color_[3 * i], color_[3 * i + 1], color_[3 * i + 2]);
    }
    double opacity_at(size_t i) const { return opacity_[i]; }
    const float* embed_at(size_t i) const { return embed_.data() + kEmbedDim * i; }

    Gaussian gaussian(size_t i) const;
    void append(const Gaussian& g);
    void set_opacity(size_t i, double v) { opacity_[i] = static_cast<float>(v); }

    // One Gaussian per valid-depth pixel (subject to stride): center from
    // backprojection, color from the frame, embedding from the feature map,
    // radius depth/f, opacity 0.5. Throws if no pixel has valid depth.
    static GaussianMap init_from_frame(const Frame& frame, const Pose& pose,
                                       const Camera& cam, const Image& features,
                                       int stride = 1);

    // Inserts Gaussians at valid-depth pixels the render left uncovered
    // (sil < tau_sil_add). Returns the number inserted.
    size_t densify(const Frame& frame, const Pose& pose, const Camera& cam,
                   const Image& render_sil, const Image& features,
                   const DensifyOptions& opts);

    // Removes Gaussians with opacity < tau_prune. Returns the number removed.
    size_t prune(double tau_prune);

    // Adam step over all five groups with post-step clamps
    // (opacity in [1e-4, 1-1e-4], r >= 1e-5, color in [0,1]).
    void adam_step(const GradientBuffer& grads, const MapLearningRates& lr);
    void reset_optimizer();

    void save(const std::string& path) const;
    static GaussianMap load(const std::string& path);

    bool bitwise_equal(const GaussianMap& other) const;

    // Optimizer state accessors (exposed for tests).
    int64_t adam_steps() const { return adam_t_; }

private:
    void check_parallel() const;

    size_t count_ = 0;
    std::vector<float> mu_;       // 3N
    std::vector<float> r_;        // N
    std::vector<float> color_;    // 3N
    std::vector<float> opacity_;  // N
    std::vector<float> embed_;    // 16N

    // First/second moment accumulators, laid out like the field arrays.
    std::vector<double> m_mu_, v_mu_;
    std::vector<double> m_r_, v_r_;
    std::vector<double> m_color_, v_color_;
    std::vector<double> m_opacity_, v_opacity_;
    std::vector<double> m_embed_, v_embed_;
    int64_t adam_t_ = 0;
};

// Radius assigned to freshly inserted Gaussians: one-pixel footprint.
double new_gaussian_radius(double depth, const Camera& cam);

}  // namespace semsplat
