#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geccl/corpus.hpp"
#include "geccl/curriculum.hpp"
#include "geccl/difficulty.hpp"
#include "geccl/errors.hpp"
#include "geccl/eval.hpp"
#include "geccl/pipeline.hpp"
#include "geccl/student.hpp"
#include "geccl/synthetic.hpp"

namespace py = pybind11;
using namespace geccl;

PYBIND11_MODULE(_geccl, m) {
  m.doc() = "GEC curriculum-learning toolkit (C++ core)";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<BackendError>(m, "BackendError");
  py::register_exception<UnscorableResponse>(m, "UnscorableResponse");

  // corpus
  py::class_<ParallelExample>(m, "ParallelExample")
      .def(py::init<>())
      .def_readwrite("id", &ParallelExample::id)
      .def_readwrite("source", &ParallelExample::source)
      .def_readwrite("target", &ParallelExample::target)
      .def_readwrite("identical", &ParallelExample::identical)
      .def("__repr__", [](const ParallelExample& e) {
        return "<ParallelExample id=" + std::to_string(e.id) + " '" + join_tokens(e.source) + "'>";
      });

  py::class_<GoldEdit>(m, "GoldEdit")
      .def(py::init<>())
      .def_readwrite("start", &GoldEdit::start)
      .def_readwrite("end", &GoldEdit::end)
      .def_readwrite("etype", &GoldEdit::etype)
      .def_readwrite("correction", &GoldEdit::correction)
      .def_readwrite("annotator", &GoldEdit::annotator)
      .def("is_noop", &GoldEdit::is_noop);

  py::class_<AnnotatedSentence>(m, "AnnotatedSentence")
      .def(py::init<>())
      .def_readwrite("source", &AnnotatedSentence::source)
      .def_readwrite("edits", &AnnotatedSentence::edits)
      .def("edits_by_annotator", &AnnotatedSentence::edits_by_annotator);

  py::class_<AnnotatedCorpus>(m, "AnnotatedCorpus")
      .def(py::init<>())
      .def_readwrite("sentences", &AnnotatedCorpus::sentences);

  m.def("split_tokens", &split_tokens);
  m.def("join_tokens", &join_tokens);
  m.def("parse_parallel", &parse_parallel, py::arg("tsv_text"));
  m.def("deduplicate", &deduplicate, py::arg("examples"));
  m.def("partition_identical", &partition_identical, py::arg("examples"));
  m.def("parse_m2", &parse_m2, py::arg("text"));
  m.def("write_m2", &write_m2, py::arg("corpus"));

  // difficulty
  py::enum_<Tier>(m, "Tier")
      .value("Easy", Tier::Easy)
      .value("Medium", Tier::Medium)
      .value("Hard", Tier::Hard);

  py::class_<DifficultyScore>(m, "DifficultyScore")
      .def(py::init<>())
      .def_readwrite("example_id", &DifficultyScore::example_id)
      .def_readwrite("raw_response", &DifficultyScore::raw_response)
      .def_readwrite("score", &DifficultyScore::score)
      .def_readwrite("backend", &DifficultyScore::backend)
      .def_readwrite("fallback", &DifficultyScore::fallback);

  py::class_<ScoringBackend>(m, "ScoringBackend")
      .def("name", &ScoringBackend::name)
      .def("calls", &ScoringBackend::calls)
      .def("respond", &ScoringBackend::respond);

  py::class_<OracleBackend, ScoringBackend>(m, "OracleBackend").def(py::init<>());
  py::class_<ReplayBackend, ScoringBackend>(m, "ReplayBackend")
      .def(py::init<std::vector<std::string>>(), py::arg("responses"))
      .def_static("from_file", &ReplayBackend::from_file, py::arg("path"));

  py::class_<ScoreCache>(m, "ScoreCache")
      .def(py::init<>())
      .def_static("open", &ScoreCache::open, py::arg("path"))
      .def_static("fingerprint", &ScoreCache::fingerprint)
      .def("size", &ScoreCache::size);

  py::enum_<UnscorableFallback>(m, "UnscorableFallback")
      .value("AssignMedium", UnscorableFallback::AssignMedium)
      .value("Drop", UnscorableFallback::Drop);

  m.def("default_prompt_template", [] { return std::string(kDefaultPromptTemplate); });
  m.def("render_prompt", &render_prompt, py::arg("template_text"), py::arg("example"));
  m.def("extract_score", &extract_score, py::arg("response"));
  m.def("try_extract_score", &try_extract_score, py::arg("response"));
  m.def("bucket", &bucket, py::arg("score"));
  m.def(
      "score_batch",
      [](ScoringBackend& backend, const std::vector<ParallelExample>& examples, ScoreCache* cache,
         int concurrency, UnscorableFallback fallback, const std::string& template_text) {
        ScoreBatchOptions options;
        options.concurrency = concurrency;
        options.fallback = fallback;
        if (!template_text.empty()) options.template_text = template_text;
        return score_batch(backend, examples, cache, options);
      },
      py::arg("backend"), py::arg("examples"), py::arg("cache") = nullptr,
      py::arg("concurrency") = 1, py::arg("fallback") = UnscorableFallback::AssignMedium,
      py::arg("template_text") = "");
  m.def("score_by_length", &score_by_length, py::arg("examples"));

  py::class_<AgreementReport>(m, "AgreementReport")
      .def_readonly("tier_agreement_rate", &AgreementReport::tier_agreement_rate)
      .def_readonly("rank_correlation", &AgreementReport::rank_correlation);
  m.def("agreement", &agreement, py::arg("scores_a"), py::arg("scores_b"));

  // curriculum
  py::enum_<Strategy>(m, "Strategy")
      .value("EasyCumulative", Strategy::EasyCumulative)
      .value("HardCumulative", Strategy::HardCumulative)
      .value("MixedReplay", Strategy::MixedReplay)
      .value("Plain", Strategy::Plain);

  py::enum_<IdenticalPolicy>(m, "IdenticalPolicy")
      .value("Exclude", IdenticalPolicy::Exclude)
      .value("AllStages", IdenticalPolicy::AllStages);

  py::class_<TieredCorpus>(m, "TieredCorpus")
      .def(py::init<>())
      .def_readwrite("easy", &TieredCorpus::easy)
      .def_readwrite("medium", &TieredCorpus::medium)
      .def_readwrite("hard", &TieredCorpus::hard)
      .def_readwrite("identical", &TieredCorpus::identical);

  py::class_<StageSpec>(m, "StageSpec")
      .def(py::init<>())
      .def_readwrite("name", &StageSpec::name)
      .def_readwrite("members", &StageSpec::members)
      .def_readwrite("shuffle_seed", &StageSpec::shuffle_seed);

  py::class_<CurriculumPlan>(m, "CurriculumPlan")
      .def(py::init<>())
      .def_readwrite("strategy", &CurriculumPlan::strategy)
      .def_readwrite("identical_policy", &CurriculumPlan::identical_policy)
      .def_readwrite("seed", &CurriculumPlan::seed)
      .def_readwrite("stages", &CurriculumPlan::stages);

  m.def("plan", &plan, py::arg("strategy"), py::arg("tiers"), py::arg("identical_policy"),
        py::arg("seed"));
  m.def(
      "mixed_replay",
      [](const TieredCorpus& tiers, std::array<int, 3> multipliers, std::uint64_t seed) {
        return mixed_replay(tiers, multipliers, seed);
      },
      py::arg("tiers"), py::arg("multipliers") = std::array<int, 3>{3, 2, 1}, py::arg("seed") = 0);
  m.def("stage_dataset", &stage_dataset, py::arg("plan"), py::arg("k"), py::arg("corpus"));
  m.def("validate_plan", &validate_plan, py::arg("plan"));
  m.def("plan_to_json", &plan_to_json);
  m.def("plan_from_json", &plan_from_json);

  // student
  py::enum_<EditOpType>(m, "EditOpType")
      .value("Match", EditOpType::Match)
      .value("Substitute", EditOpType::Substitute)
      .value("Delete", EditOpType::Delete)
      .value("Insert", EditOpType::Insert);

  py::class_<EditOp>(m, "EditOp")
      .def_readonly("type", &EditOp::type)
      .def_readonly("src_pos", &EditOp::src_pos)
      .def_readonly("tgt_pos", &EditOp::tgt_pos);

  py::class_<Observation>(m, "Observation")
      .def_readonly("source_phrase", &Observation::source_phrase)
      .def_readonly("target_phrase", &Observation::target_phrase);

  py::class_<EditRule>(m, "EditRule")
      .def_readonly("source_phrase", &EditRule::source_phrase)
      .def_readonly("target_phrase", &EditRule::target_phrase)
      .def_readonly("weight", &EditRule::weight)
      .def_readonly("penalty", &EditRule::penalty)
      .def_readonly("first_seen_stage", &EditRule::first_seen_stage)
      .def("normalized", &EditRule::normalized);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lr0", &TrainConfig::lr0)
      .def_readwrite("rho", &TrainConfig::rho)
      .def_readwrite("tau", &TrainConfig::tau)
      .def_readwrite("capacity", &TrainConfig::capacity)
      .def_readwrite("max_passes", &TrainConfig::max_passes)
      .def_readwrite("epsilon", &TrainConfig::epsilon);

  py::class_<StudentModel>(m, "StudentModel")
      .def(py::init<>())
      .def_readwrite("config", &StudentModel::config)
      .def_readwrite("stage_index", &StudentModel::stage_index)
      .def("rules", [](const StudentModel& model) {
        std::vector<EditRule> rules;
        for (const auto& [key, rule] : model.rules) rules.push_back(rule);
        return rules;
      });

  py::class_<StageMetrics>(m, "StageMetrics")
      .def_readonly("passes", &StageMetrics::passes)
      .def_readonly("dev_f_half", &StageMetrics::dev_f_half)
      .def_readonly("rule_count", &StageMetrics::rule_count)
      .def_readonly("evictions", &StageMetrics::evictions);

  py::class_<AppliedEdit>(m, "AppliedEdit")
      .def_readonly("start", &AppliedEdit::start)
      .def_readonly("end", &AppliedEdit::end)
      .def_readonly("replacement", &AppliedEdit::replacement);

  m.def("align", &align, py::arg("source"), py::arg("target"));
  m.def("extract_rules", &extract_rules, py::arg("example"));
  m.def("train_stage", &train_stage, py::arg("model"), py::arg("dataset"), py::arg("config"),
        py::arg("validate") = ValidationFn{});
  m.def("correct", &correct, py::arg("model"), py::arg("sentence"));
  m.def("checkpoint_to_json", &checkpoint_to_json);
  m.def("checkpoint_from_json", &checkpoint_from_json);
  m.def("save_checkpoint", &save_checkpoint);
  m.def("load_checkpoint", &load_checkpoint);

  // eval
  py::class_<EvalResult>(m, "EvalResult")
      .def_readonly("tp", &EvalResult::tp)
      .def_readonly("fp", &EvalResult::fp)
      .def_readonly("fn", &EvalResult::fn)
      .def_readonly("precision", &EvalResult::precision)
      .def_readonly("recall", &EvalResult::recall)
      .def_readonly("f_half", &EvalResult::f_half);

  py::class_<HypEdit>(m, "HypEdit")
      .def(py::init<>())
      .def_readwrite("start", &HypEdit::start)
      .def_readwrite("end", &HypEdit::end)
      .def_readwrite("correction", &HypEdit::correction);

  py::enum_<OpType>(m, "OpType")
      .value("Replacement", OpType::Replacement)
      .value("Missing", OpType::Missing)
      .value("Unnecessary", OpType::Unnecessary)
      .value("WordOrder", OpType::WordOrder);

  m.def("f_beta", &f_beta, py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("beta") = 0.5);
  m.def(
      "hypothesis_edits",
      [](const Tokens& source, const Tokens& hypothesis, int max_unchanged) {
        return hypothesis_edits(source, hypothesis, max_unchanged).decompositions();
      },
      py::arg("source"), py::arg("hypothesis"), py::arg("max_unchanged") = 2,
      "All edit decompositions reachable as lattice paths");
  m.def("m2_score", &m2_score, py::arg("sources"), py::arg("hypotheses"), py::arg("gold"),
        py::arg("beta") = 0.5);
  m.def("classify_op_level",
        py::overload_cast<int, int, const Tokens&, const Tokens&>(&classify_op_level),
        py::arg("start"), py::arg("end"), py::arg("correction"), py::arg("source"));
  m.def("breakdown", &breakdown, py::arg("sources"), py::arg("hypotheses"), py::arg("gold"),
        py::arg("beta") = 0.5);
  m.def("paired_t_test", &paired_t_test, py::arg("scores_a"), py::arg("scores_b"));
  m.def("student_t_two_sided_p", &student_t_two_sided_p, py::arg("t"), py::arg("df"));

  // synthetic + pipeline
  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init(&SyntheticSpec::with_defaults))
      .def_readwrite("n_pairs", &SyntheticSpec::n_pairs)
      .def_readwrite("identity_rate", &SyntheticSpec::identity_rate)
      .def_readwrite("n_dev", &SyntheticSpec::n_dev)
      .def_readwrite("n_test", &SyntheticSpec::n_test)
      .def_readwrite("noop_rate", &SyntheticSpec::noop_rate)
      .def_readwrite("easy_weight", &SyntheticSpec::easy_weight)
      .def_readwrite("medium_weight", &SyntheticSpec::medium_weight)
      .def_readwrite("hard_weight", &SyntheticSpec::hard_weight)
      .def_readwrite("seed", &SyntheticSpec::seed);

  py::class_<PlantedExample>(m, "PlantedExample")
      .def_readonly("id", &PlantedExample::id)
      .def_readonly("label", &PlantedExample::label)
      .def_readonly("edit", &PlantedExample::edit);

  py::class_<SyntheticCorpus>(m, "SyntheticCorpus")
      .def_readonly("parallel_tsv", &SyntheticCorpus::parallel_tsv)
      .def_readonly("gold_dev_m2", &SyntheticCorpus::gold_dev_m2)
      .def_readonly("gold_test_m2", &SyntheticCorpus::gold_test_m2)
      .def_readonly("sidecar_json", &SyntheticCorpus::sidecar_json)
      .def_readonly("planted", &SyntheticCorpus::planted)
      .def_readonly("class_counts", &SyntheticCorpus::class_counts);

  m.def("gen_synthetic", &gen_synthetic, py::arg("spec"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("corpus_path", &RunConfig::corpus_path)
      .def_readwrite("gold_dev_path", &RunConfig::gold_dev_path)
      .def_readwrite("gold_test_path", &RunConfig::gold_test_path)
      .def_readwrite("cache_path", &RunConfig::cache_path)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("run_id", &RunConfig::run_id)
      .def_readwrite("backend", &RunConfig::backend)
      .def_readwrite("template_path", &RunConfig::template_path)
      .def_readwrite("replay_path", &RunConfig::replay_path)
      .def_readwrite("strategy", &RunConfig::strategy)
      .def_readwrite("identical_policy", &RunConfig::identical_policy)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("concurrency", &RunConfig::concurrency)
      .def_readwrite("beta", &RunConfig::beta)
      .def_readwrite("train", &RunConfig::train);

  py::class_<StageEntry>(m, "StageEntry")
      .def_readonly("name", &StageEntry::name)
      .def_readonly("overall", &StageEntry::overall)
      .def_readonly("by_type", &StageEntry::by_type);

  py::class_<Significance>(m, "Significance")
      .def_readonly("vs", &Significance::vs)
      .def_readonly("p_value", &Significance::p_value);

  py::class_<StageReport>(m, "StageReport")
      .def_readonly("stages", &StageReport::stages)
      .def_readonly("significance", &StageReport::significance);
  m.def("report_to_json", &report_to_json);
  m.def("report_from_json", &report_from_json);
  m.def("render_report_table", &render_report_table);

  py::class_<RunArtifacts>(m, "RunArtifacts")
      .def_readonly("run_dir", &RunArtifacts::run_dir)
      .def_readonly("report", &RunArtifacts::report)
      .def_readonly("final_sentence_f", &RunArtifacts::final_sentence_f);

  py::class_<RunComparison>(m, "RunComparison")
      .def_readonly("run_a", &RunComparison::run_a)
      .def_readonly("run_b", &RunComparison::run_b)
      .def_readonly("final_a", &RunComparison::final_a)
      .def_readonly("final_b", &RunComparison::final_b)
      .def_readonly("p_value", &RunComparison::p_value)
      .def_readonly("table", &RunComparison::table);

  m.def("run_config_from_json", &run_config_from_json);
  m.def("run_config_to_json", &run_config_to_json);
  m.def("load_run_config", &load_run_config);
  m.def("run_pipeline", &run_pipeline, py::arg("config"));
  m.def("compare_runs", &compare_runs, py::arg("run_dir_a"), py::arg("run_dir_b"));
}
