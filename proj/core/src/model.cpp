#include "pagefuse/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "pagefuse/rng.hpp"

namespace pagefuse {

size_t PixelModel::parameter_count() const {
  size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> PixelModel::flatten_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void PixelModel::load_parameters(const std::vector<double>& flat) {
  if (flat.size() != parameter_count())
    throw std::runtime_error("model: parameter count mismatch");
  size_t pos = 0;
  for (auto& l : layers) {
    std::copy(flat.begin() + pos, flat.begin() + pos + l.weights.size(), l.weights.begin());
    pos += l.weights.size();
    std::copy(flat.begin() + pos, flat.begin() + pos + l.bias.size(), l.bias.begin());
    pos += l.bias.size();
  }
}

PixelModel PixelModel::create(int input_channels, int num_classes,
                              const std::vector<int>& widths, uint64_t seed) {
  if (input_channels <= 0 || num_classes <= 0)
    throw std::runtime_error("model: channel counts must be positive");
  PixelModel m;
  Rng rng(seed);
  int in_ch = input_channels;
  std::vector<int> all = widths;
  all.push_back(num_classes);
  for (int out_ch : all) {
    ConvLayer l;
    l.in_channels = in_ch;
    l.out_channels = out_ch;
    l.weights.resize(static_cast<size_t>(out_ch) * 9 * in_ch);
    l.bias.assign(out_ch, 0.0f);
    double stddev = std::sqrt(2.0 / (9.0 * in_ch));
    for (auto& w : l.weights) w = rng.normal() * stddev;
    m.layers.push_back(std::move(l));
    in_ch = out_ch;
  }
  return m;
}

namespace {

// 3x3 same-padding convolution, zero padding at the borders.
Image conv_forward(const ConvLayer& layer, const Image& in) {
  const int h = in.height, w = in.width;
  const int ci = layer.in_channels, co = layer.out_channels;
  Image out(h, w, co);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double* out_px = &out.at(y, x, 0);
      for (int oc = 0; oc < co; ++oc) out_px[oc] = layer.bias[oc];
      for (int ky = 0; ky < 3; ++ky) {
        int sy = y + ky - 1;
        if (sy < 0 || sy >= h) continue;
        for (int kx = 0; kx < 3; ++kx) {
          int sx = x + kx - 1;
          if (sx < 0 || sx >= w) continue;
          const double* in_px = &in.at(sy, sx, 0);
          for (int oc = 0; oc < co; ++oc) {
            const double* wp = &layer.weights[((static_cast<size_t>(oc) * 3 + ky) * 3 + kx) * ci];
            double acc = 0.0;
            for (int ic = 0; ic < ci; ++ic) acc += wp[ic] * in_px[ic];
            out_px[oc] += acc;
          }
        }
      }
    }
  }
  return out;
}

void relu_inplace(Image& img) {
  for (double& v : img.data)
    if (v < 0.0) v = 0.0;
}

}  // namespace

Image forward_logits(const PixelModel& model, const Image& input,
                     std::vector<Image>* activations) {
  if (model.layers.empty()) throw std::runtime_error("model: no layers");
  if (input.channels != model.input_channels())
    throw std::runtime_error("model: input has " + std::to_string(input.channels) +
                             " channels, expected " + std::to_string(model.input_channels()));
  if (activations) {
    activations->clear();
    activations->push_back(input);
  }
  Image cur = input;
  for (size_t i = 0; i < model.layers.size(); ++i) {
    cur = conv_forward(model.layers[i], cur);
    if (i + 1 < model.layers.size()) {
      relu_inplace(cur);
      if (activations) activations->push_back(cur);
    }
  }
  return cur;
}

ProbabilityMap predict(const PixelModel& model, const Image& input) {
  Image logits = forward_logits(model, input);
  ProbabilityMap probs(logits.height, logits.width, logits.channels);
  for (size_t i = 0; i < logits.data.size(); ++i)
    probs.probs[i] = static_cast<float>(1.0 / (1.0 + std::exp(-logits.data[i])));
  return probs;
}

void save_model(const PixelModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.write("PXM1", 4);
  uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  uint32_t nl = static_cast<uint32_t>(model.layers.size());
  out.write(reinterpret_cast<const char*>(&nl), 4);
  for (const auto& l : model.layers) {
    uint32_t ci = l.in_channels, co = l.out_channels;
    out.write(reinterpret_cast<const char*>(&ci), 4);
    out.write(reinterpret_cast<const char*>(&co), 4);
  }
  for (const auto& l : model.layers) {
    std::vector<float> buf(l.weights.begin(), l.weights.end());
    buf.insert(buf.end(), l.bias.begin(), l.bias.end());
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()) * 4);
  }
}

PixelModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PXM1", 4) != 0)
    throw std::runtime_error("model file: bad magic");
  uint32_t version = 0, nl = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw std::runtime_error("model file: unsupported version");
  in.read(reinterpret_cast<char*>(&nl), 4);
  PixelModel m;
  for (uint32_t i = 0; i < nl; ++i) {
    ConvLayer l;
    uint32_t ci = 0, co = 0;
    in.read(reinterpret_cast<char*>(&ci), 4);
    in.read(reinterpret_cast<char*>(&co), 4);
    if (!in) throw std::runtime_error("model file: truncated header");
    l.in_channels = static_cast<int>(ci);
    l.out_channels = static_cast<int>(co);
    l.weights.resize(static_cast<size_t>(co) * 9 * ci);
    l.bias.resize(co);
    m.layers.push_back(std::move(l));
  }
  for (auto& l : m.layers) {
    std::vector<float> buf(l.weights.size() + l.bias.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()) * 4);
    if (!in) throw std::runtime_error("model file: truncated parameters");
    std::copy(buf.begin(), buf.begin() + l.weights.size(), l.weights.begin());
    std::copy(buf.begin() + l.weights.size(), buf.end(), l.bias.begin());
  }
  return m;
}

}  // namespace pagefuse
