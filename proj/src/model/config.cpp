#include "mtad/model/config.hpp"

#include <sstream>

#include "mtad/error.hpp"

namespace mtad::model {

std::vector<std::size_t> ModelConfig::conv_lengths() const {
  std::vector<std::size_t> lengths{window_steps};
  for (const auto& c : conv_specs) {
    const std::size_t t = lengths.back();
    if (c.kernel_width == 0 || c.stride == 0 || t < c.kernel_width) {
      throw ConfigError("conv stack does not fit a window of " + std::to_string(window_steps) + " steps");
    }
    lengths.push_back((t - c.kernel_width) / c.stride + 1);
  }
  return lengths;
}

std::size_t ModelConfig::encoded_channels() const {
  return conv_specs.empty() ? channels : conv_specs.back().out_channels;
}

void ModelConfig::validate() const {
  if (channels == 0 || window_steps == 0) throw ConfigError("channels and window_steps must be positive");
  if (horizon_steps == 0) throw ConfigError("horizon_steps must be positive");
  if (lstm_layers == 0 || hidden_size == 0 || embed_dim == 0) {
    throw ConfigError("lstm_layers, hidden_size and embed_dim must be positive");
  }
  for (const auto& c : conv_specs) {
    if (c.out_channels == 0) throw ConfigError("conv output channels must be positive");
  }
  conv_lengths();
  if (class_weight_exponent < 0.0) throw ConfigError("class weight exponent k must be >= 0");
  const auto& w = loss_weights;
  if (w.reconstruction < 0.0 || w.symbol < 0.0 || w.regularization < 0.0) {
    throw ConfigError("loss weights must be non-negative");
  }
}

ModelConfig ModelConfig::paper_scale() {
  ModelConfig c;
  c.hidden_size = 256;
  return c;
}

std::vector<ConvSpec> parse_conv_specs(const std::string& text) {
  std::vector<ConvSpec> specs;
  if (text.empty() || text == "none") return specs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ConvSpec c;
    char colon1 = 0, colon2 = 0;
    std::istringstream is(item);
    if (!(is >> c.out_channels >> colon1 >> c.kernel_width >> colon2 >> c.stride) || colon1 != ':' ||
        colon2 != ':' || !is.eof()) {
      throw ConfigError("conv spec '" + item + "' must be out:width:stride");
    }
    specs.push_back(c);
  }
  return specs;
}

std::string format_conv_specs(std::span<const ConvSpec> specs) {
  if (specs.empty()) return "none";
  std::ostringstream os;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    os << (i ? "," : "") << specs[i].out_channels << ':' << specs[i].kernel_width << ':'
       << specs[i].stride;
  }
  return os.str();
}

}  // namespace mtad::model
