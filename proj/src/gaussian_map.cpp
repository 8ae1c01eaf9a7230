#include "semsplat/gaussian_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "semsplat/rasterizer.hpp"

namespace semsplat {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

constexpr double kOpacityMin = 1e-4;
constexpr double kOpacityMax = 1.0 - 1e-4;
constexpr double kRadiusMin = 1e-5;

constexpr char kMagic[4] = {'S', 'G', 'S', 'M'};
constexpr uint32_t kFormatVersion = 1;

}  // namespace

double new_gaussian_radius(double depth, const Camera& cam) {
    return depth / cam.mean_focal();
}

Gaussian GaussianMap::gaussian(size_t i) const {
    Gaussian g;
    g.mu = mu_at(i);
    g.r = r_[i];
    g.color = color_at(i);
    g.opacity = opacity_[i];
    for (int k = 0; k < kEmbedDim; ++k) g.embed[k] = embed_[kEmbedDim * i + k];
    return g;
}

void GaussianMap::append(const Gaussian& g) {
    for (int k = 0; k < 3; ++k) mu_.push_back(static_cast<float>(g.mu[k]));
    r_.push_back(static_cast<float>(g.r));
    for (int k = 0; k < 3; ++k) color_.push_back(static_cast<float>(g.color[k]));
    opacity_.push_back(static_cast<float>(g.opacity));
    for (int k = 0; k < kEmbedDim; ++k) embed_.push_back(static_cast<float>(g.embed[k]));

    m_mu_.resize(m_mu_.size() + 3, 0.0);
    v_mu_.resize(v_mu_.size() + 3, 0.0);
    m_r_.push_back(0.0);
    v_r_.push_back(0.0);
    m_color_.resize(m_color_.size() + 3, 0.0);
    v_color_.resize(v_color_.size() + 3, 0.0);
    m_opacity_.push_back(0.0);
    v_opacity_.push_back(0.0);
    m_embed_.resize(m_embed_.size() + kEmbedDim, 0.0);
    v_embed_.resize(v_embed_.size() + kEmbedDim, 0.0);
    ++count_;
}

void GaussianMap::check_parallel() const {
    const size_t n = count_;
    if (mu_.size() != 3 * n || r_.size() != n || color_.size() != 3 * n ||
        opacity_.size() != n || embed_.size() != kEmbedDim * n) {
        throw std::logic_error("GaussianMap: parallel arrays out of sync");
    }
}

GaussianMap GaussianMap::init_from_frame(const Frame& frame, const Pose& pose,
                                         const Camera& cam, const Image& features,
                                         int stride) {
    GaussianMap map;
    if (stride < 1) stride = 1;
    Gaussian g;
    for (int y = 0; y < frame.height(); y += stride) {
        for (int x = 0; x < frame.width(); x += stride) {
            const double d = frame.depth.at(y, x);
            if (d <= 0.0) continue;
            g.mu = backproject(Vec2(x, y), d, pose, cam);
            g.r = new_gaussian_radius(d, cam);
            g.color = Vec3(frame.rgb.at(y, x, 0), frame.rgb.at(y, x, 1), frame.rgb.at(y, x, 2));
            g.opacity = 0.5;
            for (int k = 0; k < kEmbedDim; ++k) g.embed[k] = features.at(y, x, k);
            map.append(g);
        }
    }
    if (map.empty()) {
        throw std::runtime_error("init_from_frame: no valid depth pixels in first frame");
    }
    return map;
}

size_t GaussianMap::densify(const Frame& frame, const Pose& pose, const Camera& cam,
                            const Image& render_sil, const Image& features,
                            const DensifyOptions& opts) {
    const int stride = std::max(1, opts.stride);

    if (!opts.per_keyframe_insertion) {
        // Trigger mode: insertion only when the covered fraction of valid
        // pixels drops below the overlap threshold.
        size_t valid = 0, covered = 0;
        for (int y = 0; y < frame.height(); ++y) {
            for (int x = 0; x < frame.width(); ++x) {
                if (frame.depth.at(y, x) <= 0.0) continue;
                ++valid;
                if (render_sil.at(y, x) >= opts.tau_sil_add) ++covered;
            }
        }
        if (valid == 0) return 0;
        if (static_cast<double>(covered) / static_cast<double>(valid) >= opts.overlap_trigger) {
            return 0;
        }
    }

    size_t added = 0;
    Gaussian g;
    for (int y = 0; y < frame.height(); y += stride) {
        for (int x = 0; x < frame.width(); x += stride) {
            const double d = frame.depth.at(y, x);
            if (d <= 0.0) continue;
            if (render_sil.at(y, x) >= opts.tau_sil_add) continue;
            g.mu = backproject(Vec2(x, y), d, pose, cam);
            g.r = new_gaussian_radius(d, cam);
            g.color = Vec3(frame.rgb.at(y, x, 0), frame.rgb.at(y, x, 1), frame.rgb.at(y, x, 2));
            g.opacity = 0.5;
            for (int k = 0; k < kEmbedDim; ++k) g.embed[k] = features.at(y, x, k);
            append(g);
            ++added;
        }
    }
    check_parallel();
    return added;
}

size_t GaussianMap::prune(double tau_prune) {
    size_t kept = 0;
    for (size_t i = 0; i < count_; ++i) {
        if (opacity_[i] < tau_prune) continue;
        if (kept != i) {
            for (int k = 0; k < 3; ++k) {
                mu_[3 * kept + k] = mu_[3 * i + k];
                color_[3 * kept + k] = color_[3 * i + k];
                m_mu_[3 * kept + k] = m_mu_[3 * i + k];
                v_mu_[3 * kept + k] = v_mu_[3 * i + k];
                m_color_[3 * kept + k] = m_color_[3 * i + k];
                v_color_[3 * kept + k] = v_color_[3 * i + k];
            }
            r_[kept] = r_[i];
            opacity_[kept] = opacity_[i];
            m_r_[kept] = m_r_[i];
            v_r_[kept] = v_r_[i];
            m_opacity_[kept] = m_opacity_[i];
            v_opacity_[kept] = v_opacity_[i];
            for (int k = 0; k < kEmbedDim; ++k) {
                embed_[kEmbedDim * kept + k] = embed_[kEmbedDim * i + k];
                m_embed_[kEmbedDim * kept + k] = m_embed_[kEmbedDim * i + k];
                v_embed_[kEmbedDim * kept + k] = v_embed_[kEmbedDim * i + k];
            }
        }
        ++kept;
    }
    const size_t removed = count_ - kept;
    count_ = kept;
    mu_.resize(3 * kept);
    r_.resize(kept);
    color_.resize(3 * kept);
    opacity_.resize(kept);
    embed_.resize(kEmbedDim * kept);
    m_mu_.resize(3 * kept);
    v_mu_.resize(3 * kept);
    m_r_.resize(kept);
    v_r_.resize(kept);
    m_color_.resize(3 * kept);
    v_color_.resize(3 * kept);
    m_opacity_.resize(kept);
    v_opacity_.resize(kept);
    m_embed_.resize(kEmbedDim * kept);
    v_embed_.resize(kEmbedDim * kept);
    check_parallel();
    return removed;
}

namespace {

inline void adam_update(float& param, double grad, double& m, double& v, double lr,
                        double bias1, double bias2, double lo, double hi) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad * grad;
    const double mhat = m / bias1;
    const double vhat = v / bias2;
    double x = static_cast<double>(param) - lr * mhat / (std::sqrt(vhat) + kAdamEps);
    x = std::clamp(x, lo, hi);
    param = static_cast<float>(x);
}

}  // namespace

void GaussianMap::adam_step(const GradientBuffer& grads, const MapLearningRates& lr) {
    if (grads.size() != count_) {
        throw std::invalid_argument("adam_step: gradient buffer size mismatch");
    }
    ++adam_t_;
    const double bias1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_t_));
    const double bias2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_t_));
    constexpr double kInf = std::numeric_limits<double>::infinity();

    for (size_t i = 0; i < count_; ++i) {
        for (int k = 0; k < 3; ++k) {
            adam_update(mu_[3 * i + k], grads.d_mu[3 * i + k], m_mu_[3 * i + k],
                        v_mu_[3 * i + k], lr.mu, bias1, bias2, -kInf, kInf);
            adam_update(color_[3 * i + k], grads.d_color[3 * i + k], m_color_[3 * i + k],
                        v_color_[3 * i + k], lr.color, bias1, bias2, 0.0, 1.0);
        }
        adam_update(r_[i], grads.d_r[i], m_r_[i], v_r_[i], lr.r, bias1, bias2, kRadiusMin,
                    kInf);
        adam_update(opacity_[i], grads.d_opacity[i], m_opacity_[i], v_opacity_[i],
                    lr.opacity, bias1, bias2, kOpacityMin, kOpacityMax);
        for (int k = 0; k < kEmbedDim; ++k) {
            adam_update(embed_[kEmbedDim * i + k], grads.d_embed[kEmbedDim * i + k],
                        m_embed_[kEmbedDim * i + k], v_embed_[kEmbedDim * i + k], lr.embed,
                        bias1, bias2, -kInf, kInf);
        }
    }
}

void GaussianMap::reset_optimizer() {
    std::fill(m_mu_.begin(), m_mu_.end(), 0.0);
    std::fill(v_mu_.begin(), v_mu_.end(), 0.0);
    std::fill(m_r_.begin(), m_r_.end(), 0.0);
    std::fill(v_r_.begin(), v_r_.end(), 0.0);
    std::fill(m_color_.begin(), m_color_.end(), 0.0);
    std::fill(v_color_.begin(), v_color_.end(), 0.0);
    std::fill(m_opacity_.begin(), m_opacity_.end(), 0.0);
    std::fill(v_opacity_.begin(), v_opacity_.end(), 0.0);
    std::fill(m_embed_.begin(), m_embed_.end(), 0.0);
    std::fill(v_embed_.begin(), v_embed_.end(), 0.0);
    adam_t_ = 0;
}

namespace {

void write_exact(std::ofstream& f, const void* p, size_t n) {
    f.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_exact(std::ifstream& f, void* p, size_t n, const char* what) {
    f.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(f.gcount()) != n) {
        throw std::runtime_error(std::string("map load: truncated file while reading ") + what);
    }
}

}  // namespace

void GaussianMap::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("map save: cannot open " + path);
    write_exact(f, kMagic, 4);
    const uint32_t version = kFormatVersion;
    write_exact(f, &version, sizeof(version));
    const uint64_t n = count_;
    write_exact(f, &n, sizeof(n));
    write_exact(f, mu_.data(), mu_.size() * sizeof(float));
    write_exact(f, r_.data(), r_.size() * sizeof(float));
    write_exact(f, color_.data(), color_.size() * sizeof(float));
    write_exact(f, opacity_.data(), opacity_.size() * sizeof(float));
    write_exact(f, embed_.data(), embed_.size() * sizeof(float));
    if (!f) throw std::runtime_error("map save: write failed for " + path);
}

GaussianMap GaussianMap::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("map load: cannot open " + path);
    char magic[4];
    read_exact(f, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("map load: bad magic in " + path);
    }
    uint32_t version = 0;
    read_exact(f, &version, sizeof(version), "version");
    if (version != kFormatVersion) {
        throw std::runtime_error("map load: unsupported format version " +
                                 std::to_string(version));
    }
    uint64_t n = 0;
    read_exact(f, &n, sizeof(n), "count");

    GaussianMap map;
    map.count_ = static_cast<size_t>(n);
    map.mu_.resize(3 * n);
    map.r_.resize(n);
    map.color_.resize(3 * n);
    map.opacity_.resize(n);
    map.embed_.resize(kEmbedDim * n);
    read_exact(f, map.mu_.data(), map.mu_.size() * sizeof(float), "mu");
    read_exact(f, map.r_.data(), map.r_.size() * sizeof(float), "radius");
    read_exact(f, map.color_.data(), map.color_.size() * sizeof(float), "color");
    read_exact(f, map.opacity_.data(), map.opacity_.size() * sizeof(float), "opacity");
    read_exact(f, map.embed_.data(), map.embed_.size() * sizeof(float), "embed");

    map.m_mu_.assign(3 * n, 0.0);
    map.v_mu_.assign(3 * n, 0.0);
    map.m_r_.assign(n, 0.0);
    map.v_r_.assign(n, 0.0);
    map.m_color_.assign(3 * n, 0.0);
    map.v_color_.assign(3 * n, 0.0);
    map.m_opacity_.assign(n, 0.0);
    map.v_opacity_.assign(n, 0.0);
    map.m_embed_.assign(kEmbedDim * n, 0.0);
    map.v_embed_.assign(kEmbedDim * n, 0.0);
    map.check_parallel();
    return map;
}

bool GaussianMap::bitwise_equal(const GaussianMap& other) const {
    auto eq = [](const std::vector<float>& a, const std::vector<float>& b) {
        return a.size() == b.size() &&
               std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
    };
    return count_ == other.count_ && eq(mu_, other.mu_) && eq(r_, other.r_) &&
           eq(color_, other.color_) && eq(opacity_, other.opacity_) &&
           eq(embed_, other.embed_);
}

void GradientBuffer::resize(size_t n) {
    d_mu.assign(3 * n, 0.0);
    d_r.assign(n, 0.0);
    d_color.assign(3 * n, 0.0);
    d_opacity.assign(n, 0.0);
    d_embed.assign(kEmbedDim * n, 0.0);
    d_pose.setZero();
}

void GradientBuffer::clear() {
    std::fill(d_mu.begin(), d_mu.end(), 0.0);
    std::fill(d_r.begin(), d_r.end(), 0.0);
    std::fill(d_color.begin(), d_color.end(), 0.0);
    std::fill(d_opacity.begin(), d_opacity.end(), 0.0);
    std::fill(d_embed.begin(), d_embed.end(), 0.0);
    d_pose.setZero();
}

}  // namespace semsplat
