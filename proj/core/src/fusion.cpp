#include "pagefuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pagefuse {

Modality parse_modality(const std::string& name) {
  if (name == "image") return Modality::Image;
  if (name == "text") return Modality::Text;
  if (name == "image+text" || name == "image_text") return Modality::ImageText;
  throw std::runtime_error("unknown modality '" + name + "' (image | text | image+text)");
}

std::string modality_name(Modality m) {
  switch (m) {
    case Modality::Image: return "image";
    case Modality::Text: return "text";
    case Modality::ImageText: return "image+text";
  }
  return "?";
}

Image resize_bilinear(const Image& in, int out_h, int out_w) {
  Image out(out_h, out_w, in.channels);
  double sy = static_cast<double>(in.height) / out_h;
  double sx = static_cast<double>(in.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y0c = std::clamp(y0, 0, in.height - 1);
    int y1c = std::clamp(y0 + 1, 0, in.height - 1);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x0c = std::clamp(x0, 0, in.width - 1);
      int x1c = std::clamp(x0 + 1, 0, in.width - 1);
      for (int c = 0; c < in.channels; ++c) {
        double top = in.at(y0c, x0c, c) * (1 - wx) + in.at(y0c, x1c, c) * wx;
        double bot = in.at(y1c, x0c, c) * (1 - wx) + in.at(y1c, x1c, c) * wx;
        out.at(y, x, c) = top * (1 - wy) + bot * wy;
      }
    }
  }
  return out;
}

ResizeResult resize_to_budget(const Image& image, const std::vector<Token>& tokens,
                              long long budget) {
  long long area = static_cast<long long>(image.height) * image.width;
  if (area <= 0) throw std::runtime_error("resize_to_budget: empty image");

  ResizeResult r;
  if (area <= budget) {
    r.image = image;
    r.tokens = tokens;
    r.scale = 1.0;
    return r;
  }
  double s = std::sqrt(static_cast<double>(budget) / static_cast<double>(area));
  int out_h = std::max(1, static_cast<int>(std::floor(image.height * s)));
  int out_w = std::max(1, static_cast<int>(std::floor(image.width * s)));
  r.image = resize_bilinear(image, out_h, out_w);
  r.scale = s;
  for (const auto& t : tokens) {
    Token nt = t;
    nt.box = t.box.scaled(s).clipped(out_w, out_h);
    if (nt.box.empty()) continue;
    nt.index = static_cast<int>(r.tokens.size());
    r.tokens.push_back(std::move(nt));
  }
  return r;
}

namespace {

struct Affine {
  // forward: output = A * (input - center) + center
  double a, b, c, d;  // row-major 2x2
  double cx, cy;

  std::pair<double, double> apply(double x, double y) const {
    double dx = x - cx, dy = y - cy;
    return {a * dx + b * dy + cx, c * dx + d * dy + cy};
  }
  Affine inverse() const {
    double det = a * d - b * c;
    return {d / det, -b / det, -c / det, a / det, cx, cy};
  }
};

}  // namespace

Sample apply_augment(const Sample& sample, const AugmentParams& params) {
  const int h = sample.image.height, w = sample.image.width;
  double cs = std::cos(params.rotation) * params.scale;
  double sn = std::sin(params.rotation) * params.scale;
  Affine fwd{cs, -sn, sn, cs, w / 2.0, h / 2.0};
  Affine inv = fwd.inverse();

  Sample out;
  out.token_channels = sample.token_channels;
  out.image = Image(h, w, sample.image.channels);
  out.mask = ClassMask(h, w, 0);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto [sx, sy] = inv.apply(x + 0.5, y + 0.5);
      // bilinear for image channels
      double fx = sx - 0.5, fy = sy - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      int y0 = static_cast<int>(std::floor(fy));
      double wx = fx - x0, wy = fy - y0;
      int x0c = std::clamp(x0, 0, w - 1), x1c = std::clamp(x0 + 1, 0, w - 1);
      int y0c = std::clamp(y0, 0, h - 1), y1c = std::clamp(y0 + 1, 0, h - 1);
      bool inside = sx >= 0 && sx < w && sy >= 0 && sy < h;
      for (int c = 0; c < sample.image.channels; ++c) {
        if (!inside) {
          out.image.at(y, x, c) = 0.0;
          continue;
        }
        double top = sample.image.at(y0c, x0c, c) * (1 - wx) + sample.image.at(y0c, x1c, c) * wx;
        double bot = sample.image.at(y1c, x0c, c) * (1 - wx) + sample.image.at(y1c, x1c, c) * wx;
        out.image.at(y, x, c) = top * (1 - wy) + bot * wy;
      }
      // nearest for the label mask
      if (inside) {
        int nx = std::clamp(static_cast<int>(std::floor(sx)), 0, w - 1);
        int ny = std::clamp(static_cast<int>(std::floor(sy)), 0, h - 1);
        out.mask.at(y, x) = sample.mask.at(ny, nx);
      }
    }
  }

  for (const auto& t : sample.tokens) {
    double xs[4] = {static_cast<double>(t.box.x_min), static_cast<double>(t.box.x_max),
                    static_cast<double>(t.box.x_min), static_cast<double>(t.box.x_max)};
    double ys[4] = {static_cast<double>(t.box.y_min), static_cast<double>(t.box.y_min),
                    static_cast<double>(t.box.y_max), static_cast<double>(t.box.y_max)};
    double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
    for (int i = 0; i < 4; ++i) {
      auto [tx, ty] = fwd.apply(xs[i], ys[i]);
      min_x = std::min(min_x, tx);
      max_x = std::max(max_x, tx);
      min_y = std::min(min_y, ty);
      max_y = std::max(max_y, ty);
    }
    Token nt = t;
    nt.box = Box{static_cast<int>(std::floor(min_x)), static_cast<int>(std::floor(min_y)),
                 static_cast<int>(std::ceil(max_x)), static_cast<int>(std::ceil(max_y))}
                 .clipped(w, h);
    // keep token indices aligned with token_channels even if a box leaves
    // the page; an empty box simply owns no pixels
    out.tokens.push_back(std::move(nt));
  }
  return out;
}

Sample augment(const Sample& sample, Rng& rng, double scale_min, double scale_max,
               double rot_min, double rot_max) {
  AugmentParams p;
  p.scale = rng.uniform(scale_min, scale_max);
  p.rotation = rng.uniform(rot_min, rot_max);
  return apply_augment(sample, p);
}

int fused_channel_count(int image_channels, int embed_channels, Modality modality) {
  return modality == Modality::Image ? image_channels : image_channels + embed_channels;
}

Image make_fused_input(const Sample& sample, Modality modality) {
  const int h = sample.image.height, w = sample.image.width;
  const int c_img = sample.image.channels;
  const int k = sample.embed_channels();

  if (modality == Modality::Image) return sample.image;

  Image fused(h, w, c_img + k, 0.0f);
  if (modality == Modality::ImageText) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < c_img; ++c) fused.at(y, x, c) = sample.image.at(y, x, c);
  }
  // Text: image channels stay zero.

  if (k > 0) {
    std::vector<int32_t> owner = rasterize_owners(h, w, sample.tokens);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int32_t t = owner[static_cast<size_t>(y) * w + x];
        if (t == kNoOwner) continue;
        const auto& ch = sample.token_channels[t];
        for (int a = 0; a < k; ++a) fused.at(y, x, c_img + a) = ch[a];
      }
  }
  return fused;
}

}  // namespace pagefuse
