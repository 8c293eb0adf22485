#pragma once

// JSON reader/writer for CLI11 config files, adapted from the JSON example
// that ships with CLI11. Subcommands appear as nested objects.

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace signnet::cli {

// Scalars are echoed as JSON numbers/booleans when they parse as such.
inline nlohmann::json typed_value(const std::string& s) {
  try {
    nlohmann::json v = nlohmann::json::parse(s);
    if (v.is_number() || v.is_boolean()) return v;
  } catch (const nlohmann::json::exception&) {
  }
  return s;
}

/// Option values of `app` (explicit or, with default_also, defaults) and of its
/// subcommands. With parsed_only, only subcommands used on this run appear.
inline nlohmann::json config_json(const CLI::App* app, bool default_also, bool parsed_only) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options({})) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string name = opt->get_lnames()[0];
    if (name == "help") continue;
    if (opt->get_type_size() != 0) {
      const auto& res = opt->results();
      if (opt->get_items_expected_max() > 1 && (!res.empty() || default_also)) {
        nlohmann::json arr = nlohmann::json::array();
        if (!res.empty()) {
          for (const auto& r : res) arr.push_back(typed_value(r));
        } else if (!opt->get_default_str().empty()) {
          std::string d = opt->get_default_str();
          if (d.size() >= 2 && d.front() == '[' && d.back() == ']') d = d.substr(1, d.size() - 2);
          for (const auto& part : CLI::detail::split(d, ','))
            if (!CLI::detail::trim_copy(part).empty())
              arr.push_back(typed_value(CLI::detail::trim_copy(part)));
        }
        j[name] = arr;
      } else if (res.size() == 1) {
        j[name] = typed_value(res[0]);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = typed_value(opt->get_default_str());
      }
    } else if (opt->count() > 0) {
      j[name] = true;
    } else if (default_also) {
      j[name] = false;
    }
  }
  for (const CLI::App* sub : app->get_subcommands({}))
    if (!parsed_only || sub->parsed()) j[sub->get_name()] = config_json(sub, default_also, parsed_only);
  return j;
}

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return config_json(app, default_also, false).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    return items(j, "", {});
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config values must be scalars or arrays of scalars");
  }

  static std::vector<CLI::ConfigItem> items(const nlohmann::json& j, const std::string& name,
                                            std::vector<std::string> prefix) {
    std::vector<CLI::ConfigItem> out;
    if (j.is_object()) {
      if (!name.empty()) {
        // Marks the section so a subcommand named `name` is triggered.
        CLI::ConfigItem open;
        open.parents = prefix;
        open.name = "++";
        open.parents.push_back(name);
        out.push_back(open);
        prefix.push_back(name);
      }
      for (const auto& [key, value] : j.items()) {
        auto sub = items(value, key, prefix);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      if (!name.empty()) {
        CLI::ConfigItem close;
        close.parents = prefix;
        close.name = "--";
        out.push_back(close);
      }
      return out;
    }
    CLI::ConfigItem item;
    item.name = name;
    item.parents = std::move(prefix);
    if (j.is_array()) {
      for (const auto& v : j) item.inputs.push_back(scalar(v));
    } else {
      item.inputs = {scalar(j)};
    }
    out.push_back(std::move(item));
    return out;
  }
};

}  // namespace signnet::cli
