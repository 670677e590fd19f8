#include "common.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>

namespace giraf::cli {

Options::Options(CLI::App *app)
  : app_{app}
{
  app_->add_option("--config", config_path_, "JSON config or manifest to start from")->check(CLI::ExistingFile);
}

void Options::resolve()
{
  if (config_path_.empty()) {
    return;
  }
  json j = read_json(config_path_);
  if (j.contains("config")) {
    j = j.at("config");
  }
  for (auto const &f : fields_) {
    if (f.opt->count() == 0 && j.contains(f.key)) {
      try {
        f.load(j);
      } catch (json::exception const &e) {
        throw std::invalid_argument("config value '" + f.key + "' has the wrong type: " + e.what());
      }
    }
  }
}

json Options::to_json() const
{
  json j = json::object();
  for (auto const &f : fields_) {
    f.save(j);
  }
  return j;
}

int default_threads()
{
  if (char const *env = std::getenv("GIRAF_THREADS")) {
    try {
      int const n = std::stoi(env);
      if (n >= 1) {
        return n;
      }
    } catch (std::exception const &) {
    }
    throw std::invalid_argument(std::string("GIRAF_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

std::filesystem::path prepare_output_dir(std::string const &dir)
{
  std::filesystem::path const p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p)) {
    throw std::runtime_error("cannot create output directory '" + dir + "'");
  }
  std::ofstream probe(p / ".giraf_write_test");
  if (!probe) {
    throw std::runtime_error("output directory '" + dir + "' is not writable");
  }
  probe.close();
  std::filesystem::remove(p / ".giraf_write_test", ec);
  return p;
}

void write_manifest(std::filesystem::path const &dir, std::string const &command, json const &config,
                    json const &outputs, json const &results)
{
  json m;
  m["tool"] = "giraf";
  m["version"] = GIRAF_VERSION;
  m["command"] = command;
  m["config"] = config;
  m["outputs"] = outputs;
  m["results"] = results;
  write_json(dir / "manifest.json", m);
}

void write_json(std::filesystem::path const &path, json const &j)
{
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write " + path.string());
  }
  os << j.dump(2) << '\n';
}

json read_json(std::filesystem::path const &path)
{
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot read " + path.string());
  }
  try {
    return json::parse(is);
  } catch (json::exception const &e) {
    throw std::invalid_argument(path.string() + " is not valid JSON: " + e.what());
  }
}

IndexSet2D rect_from(std::string const &extents)
{
  auto const e = parse_extents(extents);
  return IndexSet2D::rect(e[0], e[1]);
}

double parse_lambda(std::string const &text)
{
  if (text == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (std::exception const &) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) {
    throw std::invalid_argument("--lambda must be a positive number or 'inf', got '" + text + "'");
  }
  return v;
}

} // namespace giraf::cli
