#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "semsplat/gaussian_map.hpp"
#include "semsplat/geometry.hpp"
#include "semsplat/image.hpp"

namespace semsplat {

struct RenderOptions {
    // Per-sample contribution cap; keeps transmittance strictly positive so
    // gradients still reach occluded Gaussians.
    double g_max = 0.99;
    // Compositing at a pixel stops once transmittance falls below this.
    // 0 disables early termination.
    double tau_transmittance = 1e-4;
    // Pixels farther than cutoff_sigma * r_pix from the projected center are
    // skipped. <= 0 or inf disables the cutoff.
    double cutoff_sigma = 3.0;

    bool cutoff_enabled() const {
        return cutoff_sigma > 0 && cutoff_sigma < std::numeric_limits<double>::infinity();
    }

    static RenderOptions exact() {
        RenderOptions o;
        o.tau_transmittance = 0.0;
        o.cutoff_sigma = 0.0;
        return o;
    }
};

// One compositing step at a pixel: Gaussian index, its evaluated
// contribution g, and the transmittance in front of it. The blend weight is
// w = g * transmittance.
struct BlendEntry {
    uint32_t index;
    double g;
    double transmittance;
};

struct RenderOutput {
    int height = 0, width = 0;
    Image color;  // HxWx3
    Image depth;  // HxWx1
    Image feat;   // HxWx16
    Image sil;    // HxWx1
    // Front-to-back blend list per pixel, cached for the backward pass.
    std::vector<std::vector<BlendEntry>> blend;
    RenderOptions options;
    bool has_blend_cache = false;
};

// Per-Gaussian parameter gradients plus the camera pose tangent gradient.
struct GradientBuffer {
    std::vector<double> d_mu;       // 3N
    std::vector<double> d_r;        // N
    std::vector<double> d_color;    // 3N
    std::vector<double> d_opacity;  // N
    std::vector<double> d_embed;    // 16N
    Vec6 d_pose = Vec6::Zero();

    void resize(size_t n);
    void clear();
    size_t size() const { return d_r.size(); }
};

// Per-pixel adjoints of the four rendered channels.
struct PixelAdjoints {
    Image color;  // HxWx3
    Image depth;  // HxWx1
    Image feat;   // HxWx16
    Image sil;    // HxWx1

    PixelAdjoints() = default;
    PixelAdjoints(int h, int w)
        : color(h, w, 3), depth(h, w, 1), feat(h, w, kEmbedDim), sil(h, w, 1) {}
};

struct BackwardOptions {
    bool map_grads = true;
    bool pose_grads = true;
};

// g = min(alpha * exp(-|p - pix_center|^2 / (2 r_pix^2)), g_max).
double evaluate_gaussian(const Vec2& pix_center, double r_pix, double opacity,
                         const Vec2& p, double g_max = 0.99);

// Tiled front-to-back splatting of color/depth/feature/silhouette.
RenderOutput render(const GaussianMap& map, const Pose& pose, const Camera& cam,
                    const RenderOptions& opts = RenderOptions());

// Reference compositor: full per-pixel loop over all Gaussians, no tiling,
// no early termination, no cutoff. Test oracle only.
RenderOutput render_naive(const GaussianMap& map, const Pose& pose, const Camera& cam,
                          double g_max = 0.99);

// Analytic reverse of the forward computation actually performed (caps and
// truncations included). Throws if `out` has no blend cache.
GradientBuffer backward(const GaussianMap& map, const Pose& pose, const Camera& cam,
                        const RenderOutput& out, const PixelAdjoints& adj,
                        const BackwardOptions& bopts = BackwardOptions());

}  // namespace semsplat
