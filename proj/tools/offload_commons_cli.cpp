#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "offload_commons/c_api.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char byte[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(byte, sizeof byte, "%02x", digest[k]);
    hex += byte;
  }
  return hex;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int config_error(const std::string& message) {
  std::cerr << "config error: " << message << "\n";
  return OC_ERR_CONFIG;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-provider Wi-Fi offloading commons simulator"};
  app.set_version_flag("--version", oc_version());
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<int> grid;
  std::optional<int> rounds;
  std::optional<std::uint64_t> seed;
  const std::map<std::string, oc_command> commands{{"equilibrium", OC_EQUILIBRIUM},
                                                   {"simulate", OC_SIMULATE},
                                                   {"classify", OC_CLASSIFY},
                                                   {"sweep", OC_SWEEP},
                                                   {"dominance", OC_DOMINANCE}};
  app.add_option("command", command, "equilibrium | simulate | classify | sweep | dominance")
      ->required()
      ->check(CLI::IsMember(commands));
  app.add_option("--config", config_path, "Scenario JSON file")->required();
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--grid", grid, "Strategy grid steps per dimension (2..12)");
  app.add_option("--rounds", rounds, "Simulation rounds");
  app.add_option("--seed", seed, "Seed recorded with the scenario");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? OC_OK : OC_ERR_CONFIG;
  }

  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();

  const auto raw = read_file(config_path);
  if (!raw) return config_error("cannot open scenario file '" + config_path + "'");
  oc_scenario* scenario = nullptr;
  if (oc_scenario_load_json(raw->c_str(), &scenario) != OC_OK) return config_error(oc_last_error());
  const auto fail_config = [&] {
    const int code = config_error(oc_last_error());
    oc_scenario_free(scenario);
    return code;
  };
  if (grid && oc_scenario_set_grid_steps(scenario, *grid) != OC_OK) return fail_config();
  if (rounds && oc_scenario_set_rounds(scenario, *rounds) != OC_OK) return fail_config();
  if (seed) oc_scenario_set_seed(scenario, *seed);
  const std::string scenario_text = oc_scenario_to_json(scenario);

  oc_artifacts* artifacts = nullptr;
  const oc_status status = oc_run(scenario, commands.at(command), &artifacts);
  oc_scenario_free(scenario);
  if (status == OC_ERR_CONFIG) return config_error(oc_last_error());
  if (!artifacts) {
    std::cerr << "error: " << oc_last_error() << "\n";
    return OC_ERR_MODEL;
  }
  const std::string model_message = status == OC_ERR_MODEL ? oc_last_error() : "";

  int exit_code = status == OC_OK ? OC_OK : OC_ERR_MODEL;
  try {
    const fs::path out(out_dir);
    fs::create_directories(out);
    json files = json::array({"scenario.json", "report.json"});
    write_file(out / "scenario.json", scenario_text);
    write_file(out / "report.json", oc_artifacts_report(artifacts));
    if (const char* csv = oc_artifacts_trajectory_csv(artifacts)) {
      write_file(out / "trajectory.csv", csv);
      files.push_back("trajectory.csv");
    }
    if (const char* csv = oc_artifacts_sweep_csv(artifacts)) {
      write_file(out / "sweep.csv", csv);
      files.push_back("sweep.csv");
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const json manifest = {{"tool", "offload-commons"},
                           {"version", oc_version()},
                           {"command", command},
                           {"config_path", config_path},
                           {"config_sha256", sha256_hex(*raw)},
                           {"scenario_sha256", sha256_hex(scenario_text)},
                           {"started_at", started_at},
                           {"wall_time_seconds", wall},
                           {"exit_code", exit_code},
                           {"files", files}};
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = OC_ERR_IO;
  }
  oc_artifacts_free(artifacts);
  if (!model_message.empty()) std::cerr << "model error: " << model_message << "\n";
  return exit_code;
}
