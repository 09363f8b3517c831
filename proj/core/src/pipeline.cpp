#include "promptfold/pipeline.hpp"

#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"

namespace promptfold {

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::adaptive:
      return "adaptive";
    case Mode::oracle_type:
      return "oracle_type";
    case Mode::random_type:
      return "random_type";
    case Mode::fixed_type:
      return "fixed_type";
    case Mode::simple_compression:
      return "simple_compression";
    case Mode::no_compression:
      return "no_compression";
  }
  return "adaptive";
}

const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes = {Mode::no_compression, Mode::simple_compression, Mode::adaptive,
                                          Mode::oracle_type,    Mode::random_type,        Mode::fixed_type};
  return modes;
}

Mode parse_mode(std::string_view text) {
  for (Mode m : all_modes()) {
    if (to_string(m) == text) {
      return m;
    }
  }
  throw ConfigError("unknown mode '" + std::string(text) + "'");
}

void validate_options(const PipelineContext& ctx, const PipelineOptions& options) {
  if (ctx.catalog == nullptr || ctx.tokenizer == nullptr) {
    throw ConfigError("pipeline needs a catalog and a tokenizer");
  }
  if (!options.dry_run && ctx.backend == nullptr) {
    throw ConfigError("pipeline needs an LLM backend");
  }
  if (options.mode == Mode::no_compression) {
    if (ctx.source == nullptr) {
      throw ConfigError("no_compression mode needs the original preprompt source");
    }
    return;
  }
  if (ctx.set == nullptr) {
    throw ConfigError("mode " + std::string(to_string(options.mode)) + " needs a compressed prompt set");
  }
  for (const auto& type : ctx.catalog->types()) {
    if (!ctx.set->per_type.contains(type.name)) {
      throw ConfigError("compressed set lacks a bundle for catalog type '" + type.name + "'");
    }
  }
  switch (options.mode) {
    case Mode::random_type:
      if (!options.seed) {
        throw ConfigError("random_type mode requires a seed");
      }
      break;
    case Mode::fixed_type:
      if (!ctx.catalog->contains(options.fixed_type)) {
        throw ConfigError("fixed type '" + options.fixed_type + "' is not in the catalog");
      }
      break;
    case Mode::simple_compression:
      if (!ctx.set->generic) {
        throw ConfigError("compressed set has no type-agnostic bundle for simple_compression");
      }
      break;
    case Mode::adaptive:
      if (!ctx.catalog->contains(options.classify.fallback_type)) {
        throw ConfigError("fallback type '" + options.classify.fallback_type + "' is not in the catalog");
      }
      break;
    default:
      break;
  }
}

std::string random_type_for(const QaRecord& record, const QuestionTypeCatalog& catalog, std::uint64_t seed) {
  std::string digest = sha256_hex(record.id);
  std::uint64_t id_bits = std::stoull(digest.substr(0, 16), nullptr, 16);
  std::mt19937_64 rng(seed ^ id_bits);
  return catalog.types()[rng() % catalog.size()].name;
}

QuestionOutcome answer_question(const QaRecord& record, const PipelineContext& ctx,
                                const PipelineOptions& options, Executor& executor) {
  QuestionOutcome out;
  out.record = record;
  std::string stage = "route";
  try {
    const ApiDefinitionIndex* defs = nullptr;
    const SnippetBundle* bundle = nullptr;
    BudgetMode budget_mode = BudgetMode::single_call;
    switch (options.mode) {
      case Mode::adaptive:
        budget_mode = BudgetMode::adaptive;
        stage = "classify";
        if (options.dry_run) {
          out.predicted_type = options.classify.fallback_type;
        } else {
          auto cls = classify_question(record.question, ctx.classification_prompt, *ctx.catalog, *ctx.backend,
                                       options.classify);
          ++out.llm_calls;
          out.predicted_type = cls.type;
          out.fallback = cls.fallback;
        }
        break;
      case Mode::oracle_type:
        if (!record.type) {
          throw MissingGoldTypes("record '" + record.id + "' has no gold type for oracle_type mode");
        }
        out.predicted_type = *record.type;
        ctx.catalog->at(out.predicted_type);
        break;
      case Mode::random_type:
        out.predicted_type = random_type_for(record, *ctx.catalog, *options.seed);
        break;
      case Mode::fixed_type:
        out.predicted_type = options.fixed_type;
        break;
      case Mode::simple_compression:
        defs = &ctx.set->api_defs;
        bundle = &*ctx.set->generic;
        break;
      case Mode::no_compression:
        defs = &ctx.source->api_definitions;
        bundle = &ctx.source->snippets;
        break;
    }
    if (bundle == nullptr) {
      defs = &ctx.set->api_defs;
      bundle = &ctx.set->bundle(out.predicted_type);
    }

    stage = "assemble";
    out.budget = token_budget(*ctx.tokenizer, record.question, *defs, *bundle, ctx.instruction,
                              ctx.classification_prompt, budget_mode, options.aggregate.comment_prefix);
    out.preprompt = aggregate(*defs, ctx.instruction, *bundle, options.aggregate);
    if (options.dry_run) {
      out.result.status = ExecStatus::sandbox_unavailable;
      out.result.stage = "dry_run";
      return out;
    }

    stage = "generate";
    auto program = generate_code(out.preprompt, record.question, *ctx.backend, options.generate);
    out.llm_calls += program.attempts;
    out.output_tokens += program.output_tokens;
    out.code = program.code;

    stage = "execute";
    ExecutionRequest req;
    req.program = out.code;
    req.entry_point = program.entry_point;
    req.scene = record.scene;
    req.time_limit_ms = options.time_limit_ms;
    req.memory_limit_mb = options.memory_limit_mb;
    out.result = executor.execute(req);
    if (out.result.status != ExecStatus::ok) {
      out.result.stage = "execute";
    }
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::configuration) {
      throw;
    }
    out.result = ExecutionResult{};
    out.result.status = ExecStatus::coding_error;
    out.result.stage = stage;
    out.result.stderr_tail = e.what();
  }
  return out;
}

std::vector<QuestionOutcome> run_pipeline(const std::vector<QaRecord>& records, const PipelineContext& ctx,
                                          const PipelineOptions& options, const ExecutorFactory& make_executor,
                                          int workers) {
  validate_options(ctx, options);
  std::vector<QuestionOutcome> results(records.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr failure;

  auto work = [&] {
    try {
      auto executor = make_executor ? make_executor() : std::make_shared<UnavailableExecutor>();
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= records.size() || stop) {
          return;
        }
        results[i] = answer_question(records[i], ctx, options, *executor);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) {
        failure = std::current_exception();
      }
      stop = true;
    }
  };

  int n = std::max(1, std::min<int>(workers, static_cast<int>(records.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n; ++t) {
      threads.emplace_back(work);
    }
    for (auto& t : threads) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return results;
}

}  // namespace promptfold
