#pragma once

#include <istream>
#include <vector>

#include <CLI11.hpp>

namespace varboot::cli {

/// Config reader accepting the CLI11 TOML flavor (primary) and JSON
/// (detected by a leading '{'). Flat keys plus one section level map to
/// option names; command-line flags override file values.
class MixedConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace varboot::cli
