#pragma once

#include <string>
#include <vector>

#include "pagefuse/embedmap.hpp"
#include "pagefuse/page.hpp"
#include "pagefuse/rng.hpp"

namespace pagefuse {

enum class Modality { Image, Text, ImageText };

Modality parse_modality(const std::string& name);  // "image" | "text" | "image+text"
std::string modality_name(Modality m);

/// One page ready for the classifier: raw image channels, token boxes, the
/// per-token reduced embedding channels, and the label mask.
struct Sample {
  Image image;                                      // H x W x C
  std::vector<Token> tokens;
  std::vector<std::vector<float>> token_channels;   // n_tokens x k
  ClassMask mask;

  int embed_channels() const {
    return token_channels.empty() ? 0 : static_cast<int>(token_channels.front().size());
  }
};

struct ResizeResult {
  Image image;
  std::vector<Token> tokens;
  double scale = 1.0;
};

/// Resize so the pixel count fits the budget (bilinear, aspect preserved);
/// token boxes are rebuilt from scaled coordinates (floor on mins, ceil on
/// maxes, re-clipped), not resampled. Pages already under budget pass through.
ResizeResult resize_to_budget(const Image& image, const std::vector<Token>& tokens,
                              long long budget = 500000);

Image resize_bilinear(const Image& image, int out_height, int out_width);

struct AugmentParams {
  double scale = 1.0;
  double rotation = 0.0;  // radians
};

/// Same-size affine warp about the image center: bilinear for image
/// channels, nearest-neighbor for the label mask, axis-aligned hull for
/// token boxes (the embedding channels are rebuilt from the moved boxes,
/// never interpolated).
Sample apply_augment(const Sample& sample, const AugmentParams& params);

/// Sample scale in [scale_min, scale_max] and rotation in [rot_min, rot_max]
/// from the rng and apply. Deterministic under a fixed seed.
Sample augment(const Sample& sample, Rng& rng, double scale_min = 0.8, double scale_max = 1.2,
               double rot_min = -0.01, double rot_max = 0.01);

/// Early fusion on the channel axis. Image -> image channels only;
/// Text -> zeroed image channels + embedding channels;
/// ImageText -> image channels + embedding channels.
Image make_fused_input(const Sample& sample, Modality modality);

int fused_channel_count(int image_channels, int embed_channels, Modality modality);

}  // namespace pagefuse
