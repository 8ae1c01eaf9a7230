#pragma once

#include <optional>

#include "semsplat/geometry.hpp"
#include "semsplat/image.hpp"

namespace semsplat {

// One RGB-D-semantic observation. depth <= 0 marks invalid pixels,
// label 255 marks ignored pixels.
struct Frame {
    int id = -1;
    Image rgb;          // HxWx3 in [0,1]
    Image depth;        // HxWx1 meters
    LabelImage labels;  // HxW class ids
    std::optional<Pose> gt_pose;  // world->camera (synthetic sequences)

    int height() const { return rgb.height; }
    int width() const { return rgb.width; }
};

}  // namespace semsplat
