#ifndef PUAL_TOOLS_JSON_CONFIG_HPP
#define PUAL_TOOLS_JSON_CONFIG_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <istream>
#include <string>
#include <vector>

/// CLI11 config reader/writer for JSON files. Nested objects name subcommands:
///   {"seed": 3, "train": {"cu": 0.05, "kernel": "rbf"}}
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App *app, bool default_also, bool, std::string) const override {
        return dump(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception &e) {
            throw CLI::ConversionError("config", std::string("config file is not valid JSON: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        collect(j, "", {}, items);
        return items;
    }

  private:
    static nlohmann::json dump(const CLI::App *app, bool default_also) {
        nlohmann::json j = nlohmann::json::object();
        for (const CLI::Option *opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) {
                continue;
            }
            const std::string name = opt->get_lnames()[0];
            if (opt->count() > 0) {
                const auto &values = opt->results();
                j[name] = opt->get_type_size() == 0 ? nlohmann::json(true)
                          : values.size() == 1     ? nlohmann::json(values[0])
                                                   : nlohmann::json(values);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App *sub : app->get_subcommands({})) {
            nlohmann::json inner = dump(sub, default_also);
            if (!inner.empty()) {
                j[sub->get_name()] = std::move(inner);
            }
        }
        return j;
    }

    static std::string scalar(const nlohmann::json &v) {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "true" : "false";
        }
        return v.dump();
    }

    static void collect(const nlohmann::json &j, const std::string &name, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem> &items) {
        if (j.is_object()) {
            if (!name.empty()) {
                parents.push_back(name);
            }
            for (const auto &[key, value] : j.items()) {
                collect(value, key, parents, items);
            }
            return;
        }
        CLI::ConfigItem item;
        item.parents = std::move(parents);
        item.name = name;
        if (j.is_array()) {
            for (const auto &v : j) {
                item.inputs.push_back(scalar(v));
            }
        } else {
            item.inputs.push_back(scalar(j));
        }
        items.push_back(std::move(item));
    }
};

#endif  // PUAL_TOOLS_JSON_CONFIG_HPP
