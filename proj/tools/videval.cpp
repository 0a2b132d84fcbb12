// videval: command-line front end for the evaluation toolkit.
//
// Settings resolve in three layers: a --config key=value file is loaded
// first, command-line flags override it, and the VIDEVAL_OUTDIR environment
// variable supplies the output directory when neither names one.
//
// Exit codes: 0 success, 1 internal error, 2 invalid input or usage.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "videval/jobs.hpp"

namespace {

struct JobCli {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

CLI::Option* add_kv(CLI::App* cmd, JobCli& cli, const std::string& flag, std::string key,
                    const std::string& desc) {
  return cmd->add_option_function<std::string>(
      flag,
      [&cli, key = std::move(key)](const std::string& value) {
        cli.overrides.emplace_back(key, value);
      },
      desc);
}

CLI::Option* add_list(CLI::App* cmd, JobCli& cli, const std::string& flag, std::string key,
                      const std::string& desc) {
  return cmd
      ->add_option_function<std::vector<std::string>>(
          flag,
          [&cli, key = std::move(key)](const std::vector<std::string>& values) {
            std::string joined;
            for (const auto& v : values) {
              if (!joined.empty()) joined += ',';
              joined += v;
            }
            cli.overrides.emplace_back(key, joined);
          },
          desc)
      ->take_all();
}

CLI::Option* add_switch(CLI::App* cmd, JobCli& cli, const std::string& flag, std::string key,
                        const std::string& desc) {
  return cmd->add_flag_callback(
      flag, [&cli, key = std::move(key)] { cli.overrides.emplace_back(key, "true"); }, desc);
}

void add_common(CLI::App* cmd, JobCli& cli) {
  cmd->add_option("--config", cli.config_path, "key=value settings file (flags override it)");
  add_kv(cmd, cli, "--seed", "seed", "RNG seed (default 0)");
  add_kv(cmd, cli, "--jobs", "jobs", "worker threads (default 1)");
  add_kv(cmd, cli, "--out", "out", "output directory (default $VIDEVAL_OUTDIR or .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"videval: evaluation toolkit for video retrieval, detection, QA,"
               " summarization, and direct assessment"};
  app.require_subcommand(1);

  std::function<void(const videval::JobConfig&)> selected;
  JobCli* selected_cli = nullptr;
  auto select = [&](CLI::App* cmd, JobCli& cli, void (*fn)(const videval::JobConfig&)) {
    cmd->callback([&selected, &selected_cli, &cli, fn] {
      selected = fn;
      selected_cli = &cli;
    });
  };

  JobCli pool_cli;
  {
    auto* cmd = app.add_subcommand("pool", "sample judgment pools from ranked runs");
    add_list(cmd, pool_cli, "--runs", "runs", "run files (TSV)");
    add_kv(cmd, pool_cli, "--strata", "strata", "strata definition file");
    add_kv(cmd, pool_cli, "--chunk-size", "chunk_size", "items per pool chunk (default 1000)");
    add_kv(cmd, pool_cli, "--rank-limit", "rank_limit", "maximum rank per topic (default 1000)");
    add_common(cmd, pool_cli);
    select(cmd, pool_cli, videval::cmd_pool);
  }

  JobCli avs_cli;
  {
    auto* cmd = app.add_subcommand("score-avs", "score ad-hoc retrieval runs with xinfAP");
    add_list(cmd, avs_cli, "--runs", "runs", "run files (TSV)");
    add_kv(cmd, avs_cli, "--judgments", "judgments", "sampled judgments file");
    add_kv(cmd, avs_cli, "--strata", "strata", "strata definition file");
    add_kv(cmd, avs_cli, "--epsilon", "epsilon", "xinfAP smoothing constant (default 1e-5)");
    add_kv(cmd, avs_cli, "--rank-limit", "rank_limit", "maximum rank per topic (default 1000)");
    add_kv(cmd, avs_cli, "--team-map", "team_map", "run_tag<TAB>team file for novelty scoring");
    add_kv(cmd, avs_cli, "--novelty-mode", "novelty_mode", "novelty credit: unique|all");
    add_common(cmd, avs_cli);
    select(cmd, avs_cli, videval::cmd_score_avs);
  }

  JobCli actev_cli;
  {
    auto* cmd = app.add_subcommand("score-actev", "score activity detection with DET curves");
    add_kv(cmd, actev_cli, "--ref", "ref", "reference instance JSON");
    add_kv(cmd, actev_cli, "--sys", "sys", "system instance JSON");
    add_kv(cmd, actev_cli, "--mode", "mode", "AD or AOD (default AD)");
    add_kv(cmd, actev_cli, "--theta-t", "theta_t", "temporal IoU eligibility threshold");
    add_kv(cmd, actev_cli, "--theta-s", "theta_s", "spatial IoU threshold (default 0.5)");
    add_kv(cmd, actev_cli, "--w-tiou", "w_tiou", "kernel weight on temporal IoU");
    add_kv(cmd, actev_cli, "--w-conf", "w_conf", "kernel weight on confidence");
    add_kv(cmd, actev_cli, "--w-cong", "w_cong", "kernel weight on object congruence (AOD)");
    add_kv(cmd, actev_cli, "--pmiss-rfa", "pmiss_rfa", "RFA operating point (default 0.1)");
    add_kv(cmd, actev_cli, "--naudc-rfa", "naudc_rfa", "nAUDC upper RFA bound (default 0.2)");
    add_switch(cmd, actev_cli, "--tfa", "tfa", "also compute time-based false alarms");
    add_kv(cmd, actev_cli, "--fps", "fps", "frames per second for TFA (default 30)");
    add_switch(cmd, actev_cli, "--tfa-per-video", "tfa_per_video",
               "average TFA per video instead of corpus pooling");
    add_switch(cmd, actev_cli, "--log-x", "log_x", "logarithmic RFA axis in SVG plots");
    add_common(cmd, actev_cli);
    select(cmd, actev_cli, videval::cmd_score_actev);
  }

  JobCli dvu_cli;
  {
    auto* cmd = app.add_subcommand("score-dvu", "score question answering against a key");
    add_kv(cmd, dvu_cli, "--submission", "submission", "answer sheet (TSV)");
    add_kv(cmd, dvu_cli, "--key", "key", "answer key (TSV)");
    add_common(cmd, dvu_cli);
    select(cmd, dvu_cli, videval::cmd_score_dvu);
  }

  JobCli dsdi_cli;
  {
    auto* cmd = app.add_subcommand("score-dsdi", "score feature detection runs with MAP");
    add_list(cmd, dsdi_cli, "--runs", "runs", "run files (TSV)");
    add_kv(cmd, dsdi_cli, "--judgments", "judgments", "full judgments file");
    add_kv(cmd, dsdi_cli, "--strata", "strata",
           "strata file (default: one stratum covering all ranks)");
    add_kv(cmd, dsdi_cli, "--rank-limit", "rank_limit", "maximum rank per topic (default 1000)");
    add_list(cmd, dsdi_cli, "--exclude", "exclude", "feature ids to drop from scoring");
    add_kv(cmd, dsdi_cli, "--categories", "categories", "feature<TAB>category file");
    add_common(cmd, dsdi_cli);
    select(cmd, dsdi_cli, videval::cmd_score_dsdi);
  }

  JobCli msum_cli;
  {
    auto* cmd = app.add_subcommand("score-msum", "score summarization fact tables");
    add_kv(cmd, msum_cli, "--input", "input", "per-video fact CSV");
    add_common(cmd, msum_cli);
    select(cmd, msum_cli, videval::cmd_score_msum);
  }

  JobCli da_cli;
  {
    auto* cmd = app.add_subcommand("da", "aggregate direct-assessment ratings");
    add_kv(cmd, da_cli, "--ratings", "ratings", "worker rating CSV");
    add_kv(cmd, da_cli, "--workers", "workers", "optional worker include list (one id per line)");
    add_common(cmd, da_cli);
    select(cmd, da_cli, videval::cmd_da);
  }

  JobCli compare_cli;
  {
    auto* cmd = app.add_subcommand("compare", "pairwise randomization significance tests");
    add_kv(cmd, compare_cli, "--scores", "scores", "long-form CSV: run_id,unit_id,value");
    add_kv(cmd, compare_cli, "--alpha", "alpha", "significance level (default 0.05)");
    add_kv(cmd, compare_cli, "--iterations", "iterations",
           "Monte Carlo iterations when not exhaustive (default 100000)");
    add_kv(cmd, compare_cli, "--statistic", "statistic", "test statistic: mean|t");
    add_common(cmd, compare_cli);
    select(cmd, compare_cli, videval::cmd_compare);
  }

  JobCli plot_cli;
  {
    auto* cmd = app.add_subcommand("det-plot", "replot DET curve CSVs into one SVG");
    add_list(cmd, plot_cli, "--curves", "curves", "DET CSV files (threshold,pmiss,rfa[,tfa])");
    add_kv(cmd, plot_cli, "--plot-out", "plot_out", "output SVG name (default det_plot.svg)");
    add_kv(cmd, plot_cli, "--title", "title", "plot title");
    add_switch(cmd, plot_cli, "--log-x", "log_x", "logarithmic RFA axis");
    add_common(cmd, plot_cli);
    select(cmd, plot_cli, videval::cmd_det_plot);
  }

  JobCli gen_cli;
  {
    auto* cmd = app.add_subcommand("gen", "generate seeded synthetic fixtures");
    add_kv(cmd, gen_cli, "kind", "kind", "fixture kind: avs|actev|dvu|msum|da");
    add_kv(cmd, gen_cli, "--runs", "runs", "avs: number of runs (default 33)");
    add_kv(cmd, gen_cli, "--topics", "topics", "avs: number of topics (default 30)");
    add_kv(cmd, gen_cli, "--depth", "depth", "avs: entries per topic (default 1000)");
    add_kv(cmd, gen_cli, "--universe", "universe", "avs: item universe size (default 5x depth)");
    add_kv(cmd, gen_cli, "--activities", "activities", "actev: activity count (default 20)");
    add_kv(cmd, gen_cli, "--videos", "videos", "actev/msum/da: video count");
    add_switch(cmd, gen_cli, "--objects", "objects", "actev: attach object boxes (AOD)");
    add_kv(cmd, gen_cli, "--mc", "mc", "dvu: multiple-choice query count (default 8)");
    add_kv(cmd, gen_cli, "--rl", "rl", "dvu: ranked-list query count (default 6)");
    add_kv(cmd, gen_cli, "--systems", "systems", "msum/da: system count (default 3)");
    add_kv(cmd, gen_cli, "--workers", "workers", "da: worker count (default 5)");
    add_common(cmd, gen_cli);
    select(cmd, gen_cli, videval::cmd_gen);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  videval::JobConfig config;
  try {
    if (!selected_cli->config_path.empty())
      videval::load_config_file(config, selected_cli->config_path);
    for (const auto& [key, value] : selected_cli->overrides) config.set(key, value);
    if (!config.has("out")) {
      const char* env = std::getenv("VIDEVAL_OUTDIR");
      config.set("out", env && *env ? env : ".");
    }
    selected(config);
  } catch (const videval::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const videval::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
