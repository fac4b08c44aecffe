#pragma once

#include "cwvo/geometry.hpp"
#include "cwvo/image.hpp"

namespace cwvo {

/// Intensity in [0, 1] plus metric depth (0 = missing) on a shared camera.
struct RgbdFrame {
  int index = 0;
  double timestamp = 0.0;
  ImageD intensity;
  ImageD depth;
  Intrinsics intrinsics;
};

}  // namespace cwvo
