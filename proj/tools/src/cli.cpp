#include "promptfold/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "promptfold/errors.hpp"
#include "promptfold/eval.hpp"
#include "promptfold/http_backend.hpp"
#include "promptfold/prompt_set.hpp"
#include "promptfold/replay.hpp"
#include "promptfold/report.hpp"
#include "promptfold/run_config.hpp"
#include "promptfold/subprocess_executor.hpp"

namespace promptfold {

namespace {

struct Flags {
  std::string config;
  std::string transcript;
  std::string record;
  std::string set;
  std::string tokenizer;
  int workers = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) {
    throw ConfigError("cannot write '" + path + "'");
  }
}

std::string need(const std::string& value, const char* what) {
  if (value.empty()) {
    throw ConfigError(std::string("configuration does not name ") + what);
  }
  return value;
}

// Lazily built objects shared by the subcommands.
class Session {
 public:
  Session(const Flags& flags, std::ostream& err) : flags_(flags), err_(err) {
    if (!flags.config.empty()) {
      config_ = load_run_config(flags.config);
    }
    if (!flags.tokenizer.empty()) {
      config_.tokenizer = flags.tokenizer;
    }
    if (flags.workers > 0) {
      config_.workers = flags.workers;
    }
  }

  RunConfig& config() { return config_; }

  const Tokenizer& tokenizer() {
    if (!tokenizer_) {
      tokenizer_ = make_tokenizer(TokenizerSpec::parse(config_.tokenizer));
    }
    return *tokenizer_;
  }

  LlmBackend& backend() {
    if (backend_) {
      return *backend_;
    }
    std::string transcript = !flags_.transcript.empty() ? flags_.transcript
                             : config_.backend.kind == "replay" ? config_.transcript
                                                                 : std::string{};
    if (!transcript.empty()) {
      backend_ = std::make_shared<ReplayBackend>(ReplayTranscript::load(transcript), tokenizer_ptr(),
                                                 config_.backend.context_window);
    } else if (config_.backend.kind == "http") {
      HttpBackendConfig hc;
      hc.dialect = parse_dialect(config_.backend.dialect);
      hc.base_url = config_.backend.base_url;
      hc.model = config_.backend.model;
      if (!config_.backend.key_env.empty()) {
        const char* key = std::getenv(config_.backend.key_env.c_str());
        if (key == nullptr || *key == '\0') {
          throw ConfigError("environment variable " + config_.backend.key_env + " is not set");
        }
        hc.api_key = key;
      }
      hc.context_window = config_.backend.context_window;
      hc.requests_per_minute = config_.backend.requests_per_minute;
      hc.max_attempts = config_.backend.max_attempts;
      hc.timeout = std::chrono::milliseconds(config_.backend.timeout_ms);
      backend_ = std::make_shared<HttpBackend>(hc, tokenizer_ptr());
    } else {
      throw ConfigError("no transcript given for the replay backend");
    }
    if (!flags_.record.empty()) {
      backend_ = std::make_shared<RecordingBackend>(backend_, flags_.record);
    }
    return *backend_;
  }

  const PrepromptSource& source() {
    if (!source_) {
      source_ = std::make_unique<PrepromptSource>(
          load_preprompt_source(need(config_.definitions, "preprompt.definitions"),
                                need(config_.snippets, "preprompt.snippets"),
                                need(config_.instruction, "preprompt.instruction")));
    }
    return *source_;
  }

  bool has_source() const { return !config_.definitions.empty(); }

  const InstructionTemplates& templates() {
    if (!templates_) {
      templates_ = std::make_unique<InstructionTemplates>(
          InstructionTemplates::load_dir(need(config_.templates, "templates")));
    }
    return *templates_;
  }

  const QuestionTypeCatalog& catalog() {
    if (!catalog_) {
      catalog_ = std::make_unique<QuestionTypeCatalog>(QuestionTypeCatalog::load(need(config_.catalog, "catalog")));
    }
    return *catalog_;
  }

  std::string set_path() { return !flags_.set.empty() ? flags_.set : need(config_.compressed_set, "compressed_set"); }

  const CompressedPromptSet& compressed_set() {
    if (!set_) {
      set_ = std::make_unique<CompressedPromptSet>(load_set(set_path(), tokenizer().id()));
      if (set_->tokenizer_mismatch) {
        err_ << "warning: compressed set was counted with tokenizer '" << set_->provenance.tokenizer
             << "', configuration uses '" << tokenizer().id() << "'\n";
      }
    }
    return *set_;
  }

  ExecutorFactory executor_factory() {
    const auto& ec = config_.executor;
    if (ec.kind == "stub") {
      auto stub = StubExecutor::load(need(ec.stub, "executor.stub"));
      return [stub] { return stub; };
    }
    if (ec.kind == "subprocess") {
      if (ec.command.empty()) {
        throw ConfigError("executor.command is empty");
      }
      SubprocessOptions opts;
      opts.argv = ec.command;
      if (ec.inline_scenes) {
        opts.scene_dir = need(config_.scene_dir, "scene_dir");
      }
      return [opts] { return std::make_shared<SubprocessExecutor>(opts); };
    }
    return [] { return std::make_shared<UnavailableExecutor>(); };
  }

  std::string executor_id() { return config_.executor.kind; }

  PipelineOptions pipeline_options(Mode mode) {
    PipelineOptions o;
    o.mode = mode;
    o.seed = config_.seed;
    o.fixed_type = config_.fixed_type;
    o.classify.fallback_type = config_.fallback_type;
    o.classify.max_output_tokens = config_.limits.classify_max_tokens;
    o.generate.entry_point = config_.entry_point;
    o.generate.max_attempts = config_.limits.max_attempts;
    o.generate.max_output_tokens = config_.limits.codegen_max_tokens;
    o.aggregate.comment_prefix = config_.comment_prefix;
    o.time_limit_ms = config_.limits.time_limit_ms;
    o.memory_limit_mb = config_.limits.memory_limit_mb;
    return o;
  }

  // Pipeline inputs for `mode`; the backend is left unset for dry runs.
  PipelineContext context(Mode mode, bool with_backend) {
    PipelineContext ctx;
    ctx.catalog = &catalog();
    ctx.tokenizer = &tokenizer();
    ctx.classification_prompt = render_classification_prompt(templates(), catalog());
    if (mode != Mode::no_compression) {
      ctx.set = &compressed_set();
    }
    if (mode == Mode::no_compression || has_source()) {
      ctx.source = &source();
      ctx.instruction = source().coding_instruction;
    } else {
      ctx.instruction = slurp(need(config_.instruction, "preprompt.instruction"));
    }
    if (with_backend) {
      ctx.backend = &backend();
    }
    return ctx;
  }

  std::map<std::string, std::string> provenance(bool with_backend) {
    std::map<std::string, std::string> p;
    p["tokenizer"] = tokenizer().id();
    p["template_version"] = templates().version;
    p["executor"] = executor_id();
    if (with_backend) {
      p["backend"] = backend().id();
    }
    if (set_) {
      p["set_created_at"] = set_->provenance.created_at;
      p["set_backend"] = set_->provenance.backend_id;
    }
    return p;
  }

 private:
  std::shared_ptr<const Tokenizer> tokenizer_ptr() {
    tokenizer();
    return tokenizer_;
  }

  Flags flags_;
  std::ostream& err_;
  RunConfig config_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  std::shared_ptr<LlmBackend> backend_;
  std::unique_ptr<PrepromptSource> source_;
  std::unique_ptr<InstructionTemplates> templates_;
  std::unique_ptr<QuestionTypeCatalog> catalog_;
  std::unique_ptr<CompressedPromptSet> set_;
};

std::string trimmed(std::string s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!line.empty()) {
      out.push_back(line);
    }
  }
  return out;
}

int cmd_compress(Session& s, const std::string& out_path, std::ostream& out, std::ostream& err) {
  auto& c = s.config();
  CompressionOptions opts;
  opts.max_attempts = c.limits.max_attempts;
  opts.max_output_tokens = c.limits.compress_max_tokens;
  opts.required_names = c.required_api_names;
  opts.aggregate.comment_prefix = c.comment_prefix;
  opts.build_generic = c.generic_bundle;
  opts.timestamp = c.timestamp;
  opts.concurrent = c.workers > 1;
  const auto& source = s.source();
  auto set = build_compressed_set(source, s.catalog(), s.templates(), s.backend(), s.tokenizer(), opts);
  for (const auto& w : set.provenance.warnings) {
    err << "warning: " << w << "\n";
  }
  std::string path = out_path.empty() ? s.set_path() : out_path;
  save_set(set, path);

  const auto& counts = set.provenance.token_counts;
  double snippet_sum = 0;
  for (const auto& t : s.catalog().types()) {
    snippet_sum += static_cast<double>(counts.at("snippets:" + t.name));
  }
  auto snippet_mean = static_cast<std::size_t>(std::llround(snippet_sum / static_cast<double>(s.catalog().size())));
  std::vector<BudgetRow> rows = {{"api defs", counts.at("api_defs")},
                                 {"instruction", s.tokenizer().count(source.coding_instruction)},
                                 {"classification", counts.at("classification")},
                                 {"code snippets", snippet_mean}};
  out << budget_table(rows);
  out << "\nsnippets per type\n";
  for (const auto& t : s.catalog().types()) {
    out << "  " << t.name << " " << counts.at("snippets:" + t.name) << "\n";
  }
  if (set.generic) {
    out << "  generic " << counts.at("snippets:generic") << "\n";
  }
  std::size_t original = s.tokenizer().count(source.api_definitions.source_text());
  out << "\napi defs " << original << " -> " << counts.at("api_defs") << " tokens, reduction "
      << reduction_rate(static_cast<double>(original), static_cast<double>(counts.at("api_defs"))) << "%\n";
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_classify(Session& s, const std::vector<std::string>& questions, const std::string& batch, std::ostream& out,
                 std::ostream& err) {
  std::vector<std::string> all = questions;
  if (!batch.empty()) {
    auto lines = read_lines(batch);
    all.insert(all.end(), lines.begin(), lines.end());
  }
  if (all.empty()) {
    throw ConfigError("no question given");
  }
  auto prompt = render_classification_prompt(s.templates(), s.catalog());
  ClassifyOptions opts;
  opts.fallback_type = s.config().fallback_type;
  opts.max_output_tokens = s.config().limits.classify_max_tokens;
  for (const auto& q : all) {
    auto cls = classify_question(q, prompt, s.catalog(), s.backend(), opts);
    if (cls.fallback) {
      err << "warning: reply '" << trimmed(cls.raw_reply) << "' is not a question type; using '"
          << cls.type << "'\n";
    }
    out << cls.type << "\n";
  }
  return 0;
}

struct InferArgs {
  std::string question;
  std::string scene;
  std::string id = "q";
  std::string dataset;
  std::string mode;
  std::string type;
  std::string log;
  bool dry_run = false;
};

std::string budget_line(const TokenBudget& b) {
  return "budget total=" + std::to_string(b.total) + " api_defs=" + std::to_string(b.api_defs_tokens) +
         " instruction=" + std::to_string(b.instruction_tokens) + " classification=" +
         std::to_string(b.classification_tokens) + " snippets=" + std::to_string(b.snippet_tokens) +
         " question=" + std::to_string(b.question_tokens);
}

int cmd_infer(Session& s, const InferArgs& a, std::ostream& out, std::ostream& err) {
  Mode mode = parse_mode(a.mode.empty() ? s.config().mode : a.mode);
  auto options = s.pipeline_options(mode);
  options.dry_run = a.dry_run;
  if (a.dry_run && !a.type.empty()) {
    if (mode == Mode::adaptive) {
      options.classify.fallback_type = a.type;
    } else {
      options.fixed_type = a.type;
    }
  }

  std::vector<QaRecord> records;
  if (!a.question.empty()) {
    records.push_back(QaRecord{a.id, a.question, a.scene, "", std::nullopt});
  } else {
    records = load_dataset(a.dataset.empty() ? need(s.config().dataset, "dataset") : a.dataset);
  }
  auto ctx = s.context(mode, !a.dry_run);

  if (a.dry_run) {
    validate_options(ctx, options);
    UnavailableExecutor none;
    for (const auto& r : records) {
      auto o = answer_question(r, ctx, options, none);
      if (records.size() == 1) {
        out << concat_prompt(o.preprompt, r.question);
      }
      err << r.id << " type=" << (o.predicted_type.empty() ? "-" : o.predicted_type) << " " << budget_line(o.budget)
          << "\n";
    }
    return 0;
  }

  auto outcomes = run_pipeline(records, ctx, options, s.executor_factory(), s.config().workers);
  std::string log;
  for (const auto& o : outcomes) {
    auto rec = make_record_log(o);
    log += record_log_line(rec) + "\n";
    out << o.record.id << "\t" << (o.predicted_type.empty() ? "-" : o.predicted_type) << "\t"
        << to_string(o.result.status) << "\t" << o.result.answer.value_or("-") << "\t" << budget_line(o.budget)
        << "\n";
    if (o.fallback) {
      err << "warning: " << o.record.id << " classification fell back to '" << o.predicted_type << "'\n";
    }
    if (o.result.status != ExecStatus::ok && !o.result.stderr_tail.empty()) {
      err << o.record.id << ": " << o.result.stage << ": " << o.result.stderr_tail << "\n";
    }
  }
  if (!a.log.empty()) {
    spit(a.log, log);
  }
  return 0;
}

struct EvalArgs {
  std::string dataset;
  std::string mode;
  std::string out_dir;
  bool ablation = false;
  std::optional<double> baseline_tokens;
  std::size_t sample = 0;
  std::uint64_t sample_seed = 0;
};

int cmd_eval(Session& s, const EvalArgs& a, std::ostream& out, std::ostream&) {
  auto dataset = load_dataset(a.dataset.empty() ? need(s.config().dataset, "dataset") : a.dataset);
  if (dataset.empty()) {
    throw ConfigError("dataset is empty");
  }
  std::vector<std::pair<std::string, PipelineOptions>> runs;
  if (a.ablation) {
    for (Mode m : {Mode::no_compression, Mode::simple_compression, Mode::adaptive, Mode::oracle_type,
                   Mode::random_type}) {
      runs.emplace_back(std::string(to_string(m)), s.pipeline_options(m));
    }
    for (const auto& t : s.catalog().types()) {
      auto o = s.pipeline_options(Mode::fixed_type);
      o.fixed_type = t.name;
      runs.emplace_back("fixed_type-" + t.name, o);
    }
  } else {
    Mode m = parse_mode(a.mode.empty() ? s.config().mode : a.mode);
    runs.emplace_back(std::string(to_string(m)), s.pipeline_options(m));
  }
  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
  }

  auto factory = s.executor_factory();
  std::vector<EvalReport> reports;
  for (auto& [name, options] : runs) {
    EvalConfig cfg;
    cfg.pipeline = options;
    cfg.workers = s.config().workers;
    cfg.sample = a.sample;
    cfg.sample_seed = a.sample_seed;
    cfg.baseline_tokens = a.baseline_tokens;
    auto ctx = s.context(options.mode, true);
    cfg.provenance = s.provenance(true);
    auto run = run_eval(dataset, ctx, cfg, factory);
    if (options.mode == Mode::fixed_type) {
      run.report.mode += ":" + options.fixed_type;
    }
    if (!a.out_dir.empty()) {
      std::string suffix = a.ablation ? "-" + name : std::string{};
      std::string log;
      for (const auto& l : run.logs) {
        log += record_log_line(l) + "\n";
      }
      auto dir = std::filesystem::path(a.out_dir);
      spit((dir / ("report" + suffix + ".json")).string(), report_to_json(run.report));
      spit((dir / ("report" + suffix + ".txt")).string(), report_to_text(run.report));
      spit((dir / ("records" + suffix + ".jsonl")).string(), log);
    }
    if (!a.ablation) {
      out << report_to_text(run.report);
    }
    reports.push_back(std::move(run.report));
  }
  if (a.ablation) {
    auto table = ablation_table(reports);
    out << table;
    if (!a.out_dir.empty()) {
      spit((std::filesystem::path(a.out_dir) / "ablation.txt").string(), table);
    }
  }
  return 0;
}

int cmd_tokens(Session& s, const std::vector<std::string>& files, std::ostream& out) {
  for (const auto& f : files) {
    out << s.tokenizer().count(slurp(f)) << "\t" << f << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive prompt compression for code-generating LLM pipelines", "promptfold"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("-c,--config", flags.config, "Run configuration (JSON)");
  app.add_option("--transcript", flags.transcript, "Replay LLM responses from this transcript; no network access");
  app.add_option("--record", flags.record, "Append every LLM exchange to this transcript");
  app.add_option("--set", flags.set, "Compressed prompt set path (overrides the configuration)");
  app.add_option("--tokenizer", flags.tokenizer, "Tokenizer: whitespace or bpe:<rank file>");
  app.add_option("--workers", flags.workers, "Worker threads");

  auto* compress = app.add_subcommand("compress", "Build and save the compressed prompt set");
  std::string compress_out;
  compress->add_option("-o,--out", compress_out, "Output path");

  auto* classify = app.add_subcommand("classify", "Print the question type of each question");
  std::vector<std::string> questions;
  std::string batch;
  classify->add_option("question", questions, "Question text");
  classify->add_option("--batch", batch, "File with one question per line");

  auto* infer = app.add_subcommand("infer", "Answer a question or a dataset");
  InferArgs ia;
  infer->add_option("-q,--question", ia.question, "Single question");
  infer->add_option("--scene", ia.scene, "Scene id of the single question");
  infer->add_option("--id", ia.id, "Record id of the single question");
  infer->add_option("--dataset", ia.dataset, "Dataset (JSON lines)");
  infer->add_option("--mode", ia.mode, "Pipeline mode");
  infer->add_option("--type", ia.type, "Question type used by --dry-run");
  infer->add_option("--log", ia.log, "Write the per-record log here");
  infer->add_flag("--dry-run", ia.dry_run, "Print the assembled prompt without calling any backend");

  auto* eval = app.add_subcommand("eval", "Evaluate a dataset and write reports");
  EvalArgs ea;
  eval->add_option("--dataset", ea.dataset, "Dataset (JSON lines)");
  eval->add_option("--mode", ea.mode, "Pipeline mode");
  eval->add_option("-o,--out", ea.out_dir, "Directory for report.json, report.txt and records.jsonl");
  eval->add_flag("--ablation", ea.ablation, "Run every mode");
  eval->add_option("--baseline-tokens", ea.baseline_tokens, "Fixed baseline input tokens for the reduction rate");
  eval->add_option("--sample", ea.sample, "Evaluate a seeded random subset of this size");
  eval->add_option("--sample-seed", ea.sample_seed, "Seed of --sample");

  auto* tokens = app.add_subcommand("tokens", "Count tokens of files");
  std::vector<std::string> files;
  tokens->add_option("files", files, "Files to count")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code_for(ErrorCategory::configuration);
  }

  try {
    Session session(flags, err);
    if (*compress) {
      return cmd_compress(session, compress_out, out, err);
    }
    if (*classify) {
      return cmd_classify(session, questions, batch, out, err);
    }
    if (*infer) {
      return cmd_infer(session, ia, out, err);
    }
    if (*eval) {
      return cmd_eval(session, ea, out, err);
    }
    return cmd_tokens(session, files, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(ErrorCategory::configuration);
  }
}

}  // namespace promptfold
