#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "giraf/grid.hpp"

namespace giraf::cli {

using nlohmann::json;

/// A checked property of the run did not hold; maps to exit code 1.
struct InvariantFailure : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Binds flags to config fields. Fields not given on the command line are
/// taken from `--config` (a JSON object or a manifest holding one under
/// "config"), and the resolved values are echoed into the manifest.
class Options
{
public:
  explicit Options(CLI::App *app);

  template <class T>
  CLI::Option *add(std::string const &flag, T &field, std::string const &help)
  {
    auto *opt = app_->add_option(flag, field, help)->capture_default_str();
    std::string const key = flag.substr(2);
    fields_.push_back({opt, [&field, key](json const &j) { field = j.at(key).get<T>(); },
                       [&field, key](json &j) { j[key] = field; }, key});
    return opt;
  }

  /// Applies `--config` to every option that was not given explicitly.
  void resolve();
  json to_json() const;

private:
  struct Field
  {
    CLI::Option *opt;
    std::function<void(json const &)> load;
    std::function<void(json &)> save;
    std::string key;
  };

  CLI::App *app_;
  std::string config_path_;
  std::vector<Field> fields_;
};

/// Thread count from GIRAF_THREADS, or 1.
int default_threads();

std::filesystem::path prepare_output_dir(std::string const &dir);

/// Writes manifest.json: command, tool version, resolved config, outputs and results.
void write_manifest(std::filesystem::path const &dir, std::string const &command, json const &config,
                    json const &outputs, json const &results);

void write_json(std::filesystem::path const &path, json const &j);
json read_json(std::filesystem::path const &path);

IndexSet2D rect_from(std::string const &extents);

double parse_lambda(std::string const &text);

} // namespace giraf::cli
