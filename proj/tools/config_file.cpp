#include "config_file.hpp"

#include <string>

#include <nlohmann/json.hpp>

namespace varboot::cli {

namespace {

std::string scalar_to_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const nlohmann::json& node, std::vector<std::string> parents,
             std::vector<CLI::ConfigItem>& items) {
  for (const auto& [key, value] : node.items()) {
    if (value.is_object()) {
      auto nested = parents;
      nested.push_back(key);
      flatten(value, nested, items);
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& element : value) item.inputs.push_back(scalar_to_string(element));
    } else {
      item.inputs.push_back(scalar_to_string(value));
    }
    items.push_back(std::move(item));
  }
}

}  // namespace

std::vector<CLI::ConfigItem> MixedConfig::from_config(std::istream& input) const {
  // JSON configs start with '{'; anything else goes through the TOML path.
  std::istream::int_type first = input.peek();
  while (first != std::istream::traits_type::eof() &&
         std::isspace(static_cast<unsigned char>(first))) {
    input.get();
    first = input.peek();
  }
  if (first == '{') {
    nlohmann::json parsed = nlohmann::json::parse(input);
    std::vector<CLI::ConfigItem> items;
    flatten(parsed, {}, items);
    return items;
  }
  return CLI::ConfigBase::from_config(input);
}

}  // namespace varboot::cli
