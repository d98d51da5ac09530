// wbplc: command-line front end for the softbit piggyback concealment tools.
//
//   wbplc generate   --frames N --seed S [--config F] <out.cod>
//   wbplc embed      [--config F] --first-frame self|pass <in.cod> <out.cod>
//   wbplc conceal    [--config F] --loss P <in.cod> <out.cod> [--report CSV]
//   wbplc fec-encode [--config F] <in.cod> <out.cod>
//   wbplc fec-decode [--config F] --loss P <in.cod> <out.cod> [--report CSV]
//   wbplc simulate   --frames N --flr X [--p-bb Q | --egm S1,S2,..] --seed S
//                    --out P
//   wbplc stats      <pattern>
//   wbplc sweep      --config F --out CSV [--summary DAT] [--export-dir D]

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wbplc/channel.h"
#include "wbplc/conceal.h"
#include "wbplc/error.h"
#include "wbplc/fec_parity.h"
#include "wbplc/frame.h"
#include "wbplc/harness.h"
#include "wbplc/interleave.h"
#include "wbplc/key_value.h"

namespace {

using namespace wbplc;

struct StreamOptions {
  std::string config_path;
  std::optional<std::size_t> header_words;
  std::optional<std::size_t> payload_words;

  void AddTo(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value stream config file");
    cmd->add_option("--header-words", header_words, "header words per frame");
    cmd->add_option("--payload-words", payload_words,
                    "payload words per frame");
  }

  StreamConfig Resolve() const {
    StreamConfig config;
    if (!config_path.empty()) config = StreamConfigFrom(KeyValues::Load(config_path));
    if (header_words) config.header_words = *header_words;
    if (payload_words) config.payload_words = *payload_words;
    config.Validate();
    return config;
  }
};

void WriteReport(const std::string& path, const RecoveryReport& report) {
  if (path.empty()) {
    WriteReportCsv(std::cout, report);
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path);
  WriteReportCsv(out, report);
}

std::vector<Frame> Load(const std::string& path, const StreamConfig& config) {
  return ParseStream(ReadFileBytes(path), config);
}

void Save(const std::string& path, const std::vector<Frame>& frames,
          const StreamConfig& config) {
  WriteFileBytes(path, SerializeStream(frames, config));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Softbit piggyback frame-loss concealment tools"};
  app.require_subcommand(1);

  // generate
  StreamOptions gen_stream;
  std::size_t gen_frames = 400;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a synthetic canonical stream");
  gen_stream.AddTo(gen);
  gen->add_option("--frames", gen_frames, "frame count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "payload seed");
  gen->add_option("out", gen_out, "output .cod")->required();

  // embed
  StreamOptions emb_stream;
  std::string emb_policy = "self";
  std::string emb_in, emb_out;
  auto* emb = app.add_subcommand("embed", "piggyback each frame into its successor");
  emb_stream.AddTo(emb);
  emb->add_option("--first-frame", emb_policy, "self or pass")
      ->check(CLI::IsMember({"self", "pass"}));
  emb->add_option("in", emb_in, "canonical input .cod")->required();
  emb->add_option("out", emb_out, "embedded output .cod")->required();

  // conceal
  StreamOptions con_stream;
  std::string con_loss, con_in, con_out, con_report;
  auto* con = app.add_subcommand("conceal", "receiver: normalize and recover losses");
  con_stream.AddTo(con);
  con->add_option("--loss", con_loss, "loss pattern file")->required();
  con->add_option("--report", con_report, "report CSV (stdout if omitted)");
  con->add_option("in", con_in, "sent .cod")->required();
  con->add_option("out", con_out, "recovered canonical .cod")->required();

  // fec-encode
  StreamOptions fe_stream;
  std::string fe_in, fe_out;
  auto* fe = app.add_subcommand("fec-encode", "append one XOR parity frame per 4");
  fe_stream.AddTo(fe);
  fe->add_option("in", fe_in, "canonical input .cod")->required();
  fe->add_option("out", fe_out, "encoded output .cod")->required();

  // fec-decode
  StreamOptions fd_stream;
  std::string fd_loss, fd_in, fd_out, fd_report;
  auto* fd = app.add_subcommand("fec-decode", "recover single losses per parity group");
  fd_stream.AddTo(fd);
  fd->add_option("--loss", fd_loss, "loss pattern over the encoded stream")->required();
  fd->add_option("--report", fd_report, "report CSV (stdout if omitted)");
  fd->add_option("in", fd_in, "encoded .cod")->required();
  fd->add_option("out", fd_out, "recovered data .cod")->required();

  // simulate
  std::size_t sim_frames = 0;
  double sim_flr = 0.0;
  double sim_p_bb = 0.5;
  std::vector<double> sim_egm;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "draw a burst-loss pattern");
  sim->add_option("--frames", sim_frames, "pattern length")
      ->required()->check(CLI::PositiveNumber);
  sim->add_option("--flr", sim_flr, "stationary frame loss rate")->required();
  auto* p_bb_opt = sim->add_option("--p-bb", sim_p_bb, "2-state Bad->Bad probability");
  sim->add_option("--egm", sim_egm, "extended model persistence values")
      ->delimiter(',')->excludes(p_bb_opt);
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "pattern file")->required();

  // stats
  std::string stats_in;
  auto* stats = app.add_subcommand("stats", "loss rate and burst histogram of a pattern");
  stats->add_option("pattern", stats_in, "pattern file")->required();

  // sweep
  std::string sw_config, sw_out, sw_summary, sw_export;
  auto* sw = app.add_subcommand("sweep", "run the loss-rate sweep");
  sw->add_option("--config", sw_config, "sweep config file")->required();
  sw->add_option("--out", sw_out, "per-run CSV")->required();
  sw->add_option("--summary", sw_summary, "summary file (default <out>.summary.dat)");
  sw->add_option("--export-dir", sw_export, "write recovered streams here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const StreamConfig config = gen_stream.Resolve();
      Save(gen_out, GenerateSyntheticStream(gen_frames, gen_seed, config), config);
    } else if (*emb) {
      const StreamConfig config = emb_stream.Resolve();
      const auto frames = Load(emb_in, config);
      Save(emb_out, ProcessStream(frames, ParseFirstFramePolicy(emb_policy)),
           config);
    } else if (*con) {
      const StreamConfig config = con_stream.Resolve();
      const auto frames = Load(con_in, config);
      const auto slots = ApplyChannel(frames, ReadPatternFile(con_loss));
      const ConcealResult result = ConcealStream(slots, config);
      Save(con_out, result.frames, config);
      WriteReport(con_report, result.report);
    } else if (*fe) {
      const StreamConfig config = fe_stream.Resolve();
      Save(fe_out, FecEncode(Load(fe_in, config), config), config);
    } else if (*fd) {
      const StreamConfig config = fd_stream.Resolve();
      const auto frames = Load(fd_in, config);
      const auto slots = ApplyChannel(frames, ReadPatternFile(fd_loss));
      const ConcealResult result = FecDecode(slots, config);
      Save(fd_out, result.frames, config);
      WriteReport(fd_report, result.report);
    } else if (*sim) {
      const ChannelParams params =
          sim_egm.empty() ? ChannelParams(ParamsForFlr(sim_flr, sim_p_bb))
                          : ChannelParams(EgmParamsForFlr(sim_flr, sim_egm));
      WritePatternFile(sim_out, Simulate(sim_frames, params, sim_seed));
    } else if (*stats) {
      const LossPattern pattern = ReadPatternFile(stats_in);
      const PatternStats s = ComputePatternStats(pattern);
      std::printf("frames %zu\nflr %.6f\nmean_burst %.4f\n", pattern.size(),
                  s.flr, s.mean_burst);
      for (const auto& [len, count] : s.burst_histogram) {
        std::printf("burst %zu %llu\n", len,
                    static_cast<unsigned long long>(count));
      }
    } else if (*sw) {
      const SweepConfig config = SweepConfig::FromKeyValues(KeyValues::Load(sw_config));
      const auto reference = LoadReference(config);
      const auto rows = RunSweep(
          config, reference,
          sw_export.empty() ? std::nullopt : std::optional<std::string>(sw_export));
      std::ofstream csv(sw_out, std::ios::trunc);
      if (!csv) throw Error(ErrorCode::kIo, "cannot create " + sw_out);
      WriteSweepCsv(csv, rows);
      const std::string summary_path =
          sw_summary.empty() ? sw_out + ".summary.dat" : sw_summary;
      std::ofstream summary(summary_path, std::ios::trunc);
      if (!summary) throw Error(ErrorCode::kIo, "cannot create " + summary_path);
      WriteSweepSummary(summary, rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "wbplc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
