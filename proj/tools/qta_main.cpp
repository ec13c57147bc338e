// qta: assurance cases for software toolchains as process reductions.
//
// Verbs: validate, record, eval, simulate, report. All persistence is plain
// text (JSON documents, JSON-lines logs, CSV reports) so workspaces diff.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qta/io/case_json.hpp"
#include "qta/io/event_log.hpp"
#include "qta/io/scenario_json.hpp"
#include "qta/qta.hpp"

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path case_path;
  fs::path log_path;
  fs::path out_dir;
};

struct Options {
  std::string case_flag;
  std::string log_flag;
  std::string out_flag;
  std::string opt_level = "o0";
};

Workspace resolve_workspace(const Options& opt) {
  const char* env = std::getenv("QTA_WORKSPACE");
  const fs::path root = env ? fs::path(env) : fs::current_path();
  Workspace w;
  w.case_path = opt.case_flag.empty() ? root / "case.json" : fs::path(opt.case_flag);
  w.log_path = opt.log_flag.empty() ? root / "events.jsonl" : fs::path(opt.log_flag);
  w.out_dir = opt.out_flag.empty() ? root / "reports" : fs::path(opt.out_flag);
  return w;
}

qta::OptLevel opt_level_of(const Options& opt) {
  const auto level = qta::parse_opt_level(opt.opt_level);
  if (!level) throw qta::SchemaError("--opt-level", "expected o0 or o123");
  return *level;
}

// A missing log is an empty ledger.
qta::TrialLedger load_ledger(const fs::path& log_path) {
  std::ifstream in(log_path);
  if (!in) return {};
  return qta::io::replay_log(in);
}

// Appends under an advisory exclusive lock so concurrent writers cannot
// interleave partial lines.
void append_locked(const fs::path& log_path, const std::string& line) {
  const int fd = ::open(log_path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw qta::IoError("cannot open event log for append: " + log_path.string());
  ::flock(fd, LOCK_EX);
  const std::string with_newline = line + "\n";
  const ssize_t written = ::write(fd, with_newline.data(), with_newline.size());
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (written != static_cast<ssize_t>(with_newline.size()))
    throw qta::IoError("short write to event log: " + log_path.string());
}

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void print_counters(const qta::CounterSet& c, qta::OptLevel level) {
  std::cout << "counters[" << qta::to_string(level) << "]: m=" << c.total_trials
            << " n=" << c.code_sign_trials << " s1=(" << c.s1.alpha << "," << c.s1.beta << ")"
            << " s3=(" << c.s3.alpha << "," << c.s3.beta << ")"
            << " p1=(" << c.p1.alpha << "," << c.p1.beta << ")"
            << " p3=(" << c.p3.alpha << "," << c.p3.beta << ")\n";
}

int cmd_validate(const Workspace& w) {
  const qta::AssuranceCase c = qta::io::load_case_file(w.case_path);
  std::cout << "ok: root '" << c.root_id() << "', " << c.nodes().size() << " nodes, conjunction:";
  for (const std::string& id : c.conjunction()) std::cout << " " << id;
  std::cout << "\n";
  return 0;
}

struct RecordArgs {
  std::string stage;
  std::string input_id;
  bool from_stdin = false;
  qta::TrialFacts facts;
};

int cmd_record(const Workspace& w, const Options& opt, const RecordArgs& args) {
  qta::TrialLedger ledger = load_ledger(w.log_path);

  qta::TrialEvent event;
  if (args.from_stdin) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(std::cin);
    } catch (const nlohmann::json::parse_error& e) {
      throw qta::MalformedEventError(std::string("invalid JSON event: ") + e.what());
    }
    if (!doc.contains("sequence")) doc["sequence"] = ledger.next_sequence();
    event = qta::io::event_from_json(doc);
  } else {
    const auto stage = qta::parse_stage(args.stage);
    if (!stage)
      throw qta::MalformedEventError("unknown stage '" + args.stage + "'");
    event.stage = *stage;
    event.input_id = args.input_id;
    event.opt_level = opt_level_of(opt);
    event.facts = args.facts;
    event.sequence = ledger.next_sequence();
  }

  const auto result = ledger.record(event);  // validates before anything is written
  append_locked(w.log_path, qta::io::format_event_line(event));

  if (result.duplicate)
    std::cout << "duplicate, counters unchanged (sequence=" << result.sequence << ")\n";
  else
    std::cout << "recorded, sequence=" << result.sequence << "\n";
  print_counters(ledger.counters(event.opt_level), event.opt_level);
  return 0;
}

struct EvalArgs {
  std::string s2_source = "prior";
  std::vector<std::string> reclassify;
};

qta::AssuranceCase apply_reclassifications(qta::AssuranceCase c,
                                           const std::vector<std::string>& specs) {
  for (const std::string& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw qta::SchemaError("--reclassify", "expected <node id>=<classification>");
    const auto cls = qta::parse_classification(spec.substr(eq + 1));
    if (!cls)
      throw qta::SchemaError("--reclassify", "expected \"controlled\" or \"uncontrolled\"");
    c = c.reclassify(spec.substr(0, eq), *cls);
  }
  return c;
}

int cmd_eval(const Workspace& w, const Options& opt, const EvalArgs& args) {
  const qta::AssuranceCase loaded = qta::io::load_case_file(w.case_path);
  const qta::AssuranceCase c = apply_reclassifications(loaded, args.reclassify);
  const qta::TrialLedger ledger = load_ledger(w.log_path);
  const qta::OptLevel level = opt_level_of(opt);

  std::optional<qta::FrozenAssessment> s2_override;
  if (args.s2_source.rfind("frozen:", 0) == 0) {
    const std::string id = args.s2_source.substr(7);
    const fs::path path = w.out_dir / ("frozen_" + id + ".json");
    if (!fs::exists(path))
      throw qta::DanglingReferenceError("frozen assessment '" + id + "' not found at " +
                                        path.string());
    s2_override = qta::io::load_frozen_file(path);
  } else if (args.s2_source != "prior") {
    throw qta::SchemaError("--s2-source", "expected prior or frozen:<id>");
  }

  std::map<std::string, qta::BetaParams> resolved;
  const qta::EvidenceResolver resolver = [&](const std::string& id) -> qta::BetaParams {
    if (s2_override && id == "s2") {
      resolved[id] = s2_override->beta;
      return s2_override->beta;
    }
    const qta::HypothesisNode* node = c.find(id);
    if (!node || !node->evidence) throw qta::InsufficientEvidenceError(id);
    const qta::BetaParams params = std::visit(
        [&](const auto& source) -> qta::BetaParams {
          using T = std::decay_t<decltype(source)>;
          if constexpr (std::is_same_v<T, qta::FixedPrior>) {
            return source.prior;
          } else if constexpr (std::is_same_v<T, qta::CounterBacked>) {
            try {
              return ledger.resolve(source.counter_id, level);
            } catch (const qta::UnknownCounterError& e) {
              throw qta::DanglingReferenceError("node '" + id + "': " + e.what());
            }
          } else {
            const fs::path path = w.out_dir / ("frozen_" + source.tracker_id + ".json");
            if (!fs::exists(path))
              throw qta::DanglingReferenceError("node '" + id + "': frozen assessment '" +
                                                source.tracker_id + "' not found");
            return qta::io::load_frozen_file(path).beta;
          }
        },
        *node->evidence);
    resolved[id] = params;
    return params;
  };

  const std::uint64_t position = ledger.log().size();
  const qta::ReductionReport report = qta::evaluate_strength(c, resolver, position);

  std::cout << "strength = " << fmt(report.strength) << "\n";
  std::cout << "confidence_variance = " << fmt(report.confidence_variance) << "\n";
  std::cout << "uncontrolled:";
  for (const std::string& id : report.uncontrolled_ids) std::cout << " " << id;
  std::cout << "\n";
  std::cout << "evaluated_at = " << report.evaluated_at << "\n";
  for (const auto& [id, m] : report.per_node_moments) {
    const qta::BetaParams& p = resolved.at(id);
    std::cout << "node " << id << ": Beta(" << fmt(p.alpha) << "," << fmt(p.beta)
              << ") mean=" << fmt(m.mean) << " variance=" << fmt(m.variance) << "\n";
  }

  // one CSV row per evaluation; columns fixed by document node order
  fs::create_directories(w.out_dir);
  const fs::path csv_path = w.out_dir / "strength_history.csv";
  const bool fresh = !fs::exists(csv_path);
  std::ofstream csv(csv_path, std::ios::app);
  if (!csv) throw qta::IoError("cannot open " + csv_path.string());
  if (fresh) {
    csv << "position,opt_level,strength,variance";
    for (const qta::HypothesisNode& n : loaded.nodes())
      csv << "," << n.id << "_alpha," << n.id << "_beta";
    csv << "\n";
  }
  csv << position << "," << qta::to_string(level) << "," << fmt(report.strength) << ","
      << fmt(report.confidence_variance);
  for (const qta::HypothesisNode& n : loaded.nodes()) {
    const auto it = resolved.find(n.id);
    if (it == resolved.end())
      csv << ",,";
    else
      csv << "," << fmt(it->second.alpha) << "," << fmt(it->second.beta);
  }
  csv << "\n";
  std::cout << "csv: " << csv_path.string() << "\n";
  return 0;
}

struct SimulateArgs {
  std::string scenario;
  std::size_t max_iter = 0;
};

int cmd_simulate(const Workspace& w, const SimulateArgs& args) {
  const qta::SystemState initial = qta::io::load_scenario_file(args.scenario);
  const qta::FixedPointResult result = qta::fixed_point(initial, args.max_iter);
  const qta::FrozenAssessment frozen = qta::freeze(result.state);

  fs::create_directories(w.out_dir);
  const fs::path trace_path = w.out_dir / ("trace_" + initial.project_id + ".jsonl");
  std::ofstream trace(trace_path, std::ios::trunc);
  if (!trace) throw qta::IoError("cannot open " + trace_path.string());
  qta::io::write_trace(trace, result);

  const fs::path frozen_path = w.out_dir / ("frozen_" + initial.project_id + ".json");
  std::ofstream out(frozen_path, std::ios::trunc);
  if (!out) throw qta::IoError("cannot open " + frozen_path.string());
  out << qta::io::frozen_to_json(frozen).dump(2) << "\n";

  std::size_t steps = 0;
  for (const qta::HStepOutcome& o : result.trace) steps += o.case_fired != qta::HCase::Identity;
  std::cout << "project = " << initial.project_id << "\n";
  std::cout << "steps = " << steps << "\n";
  std::cout << "ub_counts =";
  for (std::size_t n : result.ub_counts) std::cout << " " << n;
  std::cout << "\n";
  std::cout << "final = Beta(" << fmt(result.state.beta.alpha) << ","
            << fmt(result.state.beta.beta) << ")\n";
  std::cout << "frozen no-UB probability = " << fmt(frozen.no_ub_probability) << "\n";
  std::cout << "trace: " << trace_path.string() << "\n";
  std::cout << "frozen: " << frozen_path.string() << "\n";
  return 0;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int cmd_report(const Workspace& w, const std::string& format) {
  const fs::path csv_path = w.out_dir / "strength_history.csv";
  std::ifstream in(csv_path);
  std::vector<std::string> lines;
  std::string line;
  while (in && std::getline(in, line)) lines.push_back(line);
  if (lines.size() < 2)
    throw qta::InsufficientEvidenceError("(evaluation history is empty)");

  if (format == "csv") {
    for (const std::string& l : lines) std::cout << l << "\n";
    return 0;
  }

  const std::vector<std::string> header = split_csv(lines.front());
  std::printf("%-10s %-9s %-22s %-22s\n", "position", "opt_level", "strength", "variance");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv(lines[i]);
    std::printf("%-10s %-9s %-22s %-22s\n", fields[0].c_str(), fields[1].c_str(),
                fields[2].c_str(), fields[3].c_str());
  }
  std::printf("\nevidence at position %s:\n", split_csv(lines.back())[0].c_str());
  std::printf("%-8s %-22s %-22s\n", "node", "alpha", "beta");
  const auto last = split_csv(lines.back());
  for (std::size_t col = 4; col + 1 < header.size(); col += 2) {
    const std::string node = header[col].substr(0, header[col].rfind("_alpha"));
    const std::string alpha = col < last.size() ? last[col] : "";
    const std::string beta = col + 1 < last.size() ? last[col + 1] : "";
    std::printf("%-8s %-22s %-22s\n", node.c_str(), alpha.empty() ? "-" : alpha.c_str(),
                beta.empty() ? "-" : beta.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  RecordArgs record_args;
  EvalArgs eval_args;
  SimulateArgs simulate_args;
  std::string report_format = "text";

  CLI::App app{"quantitative assurance cases for software toolchains"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--case", opt.case_flag, "case document path");
  app.add_option("--log", opt.log_flag, "event log path");
  app.add_option("--out", opt.out_flag, "report output directory");
  app.add_option("--opt-level", opt.opt_level, "optimization level: o0 or o123");

  app.add_subcommand("validate", "check a case document against the schema");

  CLI::App* record = app.add_subcommand("record", "append one toolchain trial event");
  record->add_option("--stage", record_args.stage,
                     "compile | compile-sanitize | compile-code-sign | compile-sanitize-code-sign");
  record->add_option("--input", record_args.input_id, "content digest of the source fileset");
  record->add_flag("--stdin", record_args.from_stdin, "read one JSON event from stdin");
  record->add_flag("--alice-signed", record_args.facts.alice_signed, "");
  record->add_flag("--sanitizer-rejected-source", record_args.facts.sanitizer_rejected_source, "");
  record->add_flag("--signer-authenticated-as-alice",
                   record_args.facts.signer_authenticated_as_alice, "");
  record->add_flag("--impostor-authenticated", record_args.facts.impostor_authenticated, "");
  record->add_flag("--q-signed-with-private-key", record_args.facts.q_signed_with_private_key, "");
  record->add_flag("--alice-issued-keypair", record_args.facts.alice_issued_keypair, "");
  record->add_flag("--private-key-known-only-to-alice",
                   record_args.facts.private_key_known_only_to_alice, "");

  CLI::App* eval = app.add_subcommand("eval", "evaluate strength and append a history row");
  eval->add_option("--s2-source", eval_args.s2_source, "prior | frozen:<id>");
  eval->add_option("--reclassify", eval_args.reclassify,
                   "<node id>=<classification>, repeatable");

  CLI::App* simulate = app.add_subcommand("simulate", "run the test-driven update to a fixed point");
  simulate->add_option("--scenario", simulate_args.scenario, "scenario file")->required();
  simulate->add_option("--max-iter", simulate_args.max_iter,
                       "iteration budget (default: derived from the instance count)");

  CLI::App* report = app.add_subcommand("report", "render the evaluation history");
  report->add_option("--format", report_format, "csv | text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Workspace w = resolve_workspace(opt);
  try {
    if (app.got_subcommand("validate")) return cmd_validate(w);
    if (app.got_subcommand("record")) return cmd_record(w, opt, record_args);
    if (app.got_subcommand("eval")) return cmd_eval(w, opt, eval_args);
    if (app.got_subcommand("simulate")) return cmd_simulate(w, simulate_args);
    if (app.got_subcommand("report")) return cmd_report(w, report_format);
    return 2;
  } catch (const qta::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qta::InsufficientEvidenceError& e) {
    std::cerr << "error: insufficient evidence: " << e.what() << "\n";
    return 4;
  } catch (const qta::NoEvidenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const qta::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\nub_counts:";
    for (std::size_t n : e.ub_counts()) std::cerr << " " << n;
    std::cerr << "\n";
    return 5;
  } catch (const qta::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
