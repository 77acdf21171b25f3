#include "bdparse/cli.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "bdparse/config.hpp"
#include "bdparse/csv.hpp"
#include "bdparse/errors.hpp"
#include "bdparse/metrics.hpp"

namespace bdparse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json counters_json(const PipelineCounters& c) {
    return json{
        {"matched_bdpt_forward", c.matched_bdpt_forward},
        {"matched_bdpt_reverse", c.matched_bdpt_reverse},
        {"matched_ptmp", c.matched_ptmp},
        {"new_templates", c.new_templates},
        {"nlpe_invocations", c.nlpe_invocations},
        {"llm_calls", c.llm_calls},
        {"malformed_replies", c.malformed_replies},
        {"stage2_unavailable", c.stage2_unavailable},
        {"skipped_lines", c.skipped_lines},
        {"lines_parsed", c.lines_parsed()},
    };
}

std::string match_count_bin(std::uint64_t n) {
    if (n <= 1) return "1";
    if (n < 10) return "2-9";
    if (n < 100) return "10-99";
    if (n < 1000) return "100-999";
    return "1000+";
}

std::string percent(std::uint64_t part, std::uint64_t whole) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << (whole == 0 ? 0.0 : 100.0 * double(part) / double(whole)) << '%';
    return s.str();
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::map<std::uint64_t, std::string> read_templates_by_line(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    const auto table = csv::read_table(in);
    const auto line_col = table.column("LineId");
    const auto tpl_col = table.column("EventTemplate");
    if (!line_col || !tpl_col) throw Error(path.string() + ": needs LineId and EventTemplate columns");
    std::map<std::uint64_t, std::string> out;
    for (const auto& row : table.rows) {
        if (row.size() <= std::max(*line_col, *tpl_col)) throw Error(path.string() + ": short row");
        std::uint64_t id = 0;
        try {
            id = std::stoull(row[*line_col]);
        } catch (const std::exception&) {
            throw Error(path.string() + ": bad LineId '" + row[*line_col] + "'");
        }
        if (!out.emplace(id, row[*tpl_col]).second) {
            throw Error(path.string() + ": duplicate LineId " + std::to_string(id));
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> read_messages(const fs::path& path, InputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read input " + path.string());
    if (format == InputFormat::automatic) format = path.extension() == ".csv" ? InputFormat::csv : InputFormat::text;

    std::vector<std::string> messages;
    if (format == InputFormat::csv) {
        const auto table = csv::read_table(in);
        if (table.header.empty()) return messages;
        const auto col = table.column("Content");
        if (!col) throw Error(path.string() + ": no Content column");
        for (const auto& row : table.rows) messages.push_back(*col < row.size() ? row[*col] : std::string{});
        return messages;
    }
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        messages.push_back(std::move(line));
    }
    return messages;
}

json stats_json(const Parser& parser, const llm::UsageCounters& usage) {
    json pool = json::array();
    const auto& p = parser.pool();
    for (auto n : p.lengths()) {
        const auto ids = p.bucket(n);
        std::uint64_t updated = 0;
        std::map<std::string, std::uint64_t> bins;
        for (auto id : ids) {
            const auto& t = p.get(id);
            updated += t.updated ? 1 : 0;
            ++bins[match_count_bin(t.match_count)];
        }
        pool.push_back({{"length", n},
                        {"size", ids.size()},
                        {"updated", updated},
                        {"not_updated", ids.size() - updated},
                        {"match_count_histogram", bins}});
    }
    return json{
        {"counters", counters_json(parser.counters())},
        {"usage",
         {{"invocations", usage.invocations},
          {"prompt_tokens", usage.prompt_tokens},
          {"completion_tokens", usage.completion_tokens}}},
        {"templates", p.size()},
        {"pool", pool},
    };
}

int cmd_parse(const ParseCommand& cmd, std::ostream& out, std::ostream& err) {
    try {
        AppConfig cfg = cmd.config ? load_app_config(*cmd.config) : default_app_config();
        if (cmd.top_k) cfg.top_k = cmd.top_k;

        const bool needs_llm = !cmd.flags.disable_nlpe && !cmd.flags.disable_llm;
        std::unique_ptr<llm::Client> client;
        if (cmd.backend == Backend::live) {
            auto key = llm::resolve_api_key(cfg.llm);
            if (!key && needs_llm) {
                err << "error: environment variable " << cfg.llm.api_key_env << " is not set (required by --backend live)\n";
                return 2;
            }
            client = std::make_unique<llm::HttpClient>(cfg.llm, key.value_or(""));
        } else {
            client = std::make_unique<llm::MockClient>(cmd.fixtures);
        }

        std::shared_ptr<const pos::Tagger> tagger;
        if (cmd.lexicon) {
            tagger = std::make_shared<pos::LexiconTagger>(
                std::make_shared<pos::Lexicon>(pos::Lexicon::load(*cmd.lexicon)), cfg.preprocess.placeholder);
        } else {
            tagger = std::make_shared<pos::LexiconTagger>(
                std::shared_ptr<const pos::Lexicon>(&pos::Lexicon::builtin(), [](const pos::Lexicon*) {}),
                cfg.preprocess.placeholder);
        }

        const auto messages = read_messages(cmd.input, cmd.format);

        PipelineOptions options{cfg.similarity_threshold, cfg.top_k, cmd.flags};
        Parser parser(options, Preprocessor(cfg.preprocess), tagger, client.get());
        std::uint64_t failures = 0;
        for (std::size_t i = 0; i < messages.size(); ++i) {
            try {
                parser.parse_line(messages[i]);
            } catch (const std::exception& e) {
                ++failures;
                err << "warning: line " << i + 1 << ": " << e.what() << '\n';
            }
        }
        for (const auto& s : parser.skipped()) err << "warning: line " << s.input_line << " skipped: " << s.reason << '\n';

        fs::create_directories(cmd.out_dir);
        const std::string stem = cmd.input.stem().string();
        const auto result = parser.export_results();
        {
            auto f = open_output(cmd.out_dir / (stem + "_structured.csv"));
            csv::write_row(f, {"LineId", "Content", "EventId", "EventTemplate"});
            for (const auto& r : result.records) {
                csv::write_row(f, {std::to_string(r.line_id), r.content, to_string(r.template_id), r.template_text});
            }
        }
        {
            auto f = open_output(cmd.out_dir / (stem + "_templates.csv"));
            csv::write_row(f, {"EventId", "EventTemplate", "Occurrences"});
            for (const auto& t : result.templates) {
                csv::write_row(f, {to_string(t.id), t.text, std::to_string(t.occurrences)});
            }
        }
        {
            auto stats = stats_json(parser, client->usage());
            stats["backend"] = cmd.backend == Backend::live ? "live" : "mock";
            stats["failed_lines"] = failures;
            if (const auto* mock = dynamic_cast<const llm::MockClient*>(client.get())) {
                stats["mock"] = {{"fixture_hits", mock->fixture_hits()}, {"heuristic_replies", mock->heuristic_replies()}};
            }
            auto f = open_output(cmd.out_dir / (stem + "_stats.json"));
            f << stats.dump(2) << '\n';
        }
        out << "parsed " << result.records.size() << " lines into " << result.templates.size() << " templates ("
            << parser.counters().llm_calls << " LLM calls)\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_evaluate(const EvaluateCommand& cmd, std::ostream& out, std::ostream& err) {
    try {
        const auto pred = read_templates_by_line(cmd.predictions);
        const auto truth = read_templates_by_line(cmd.truth);
        const auto corpus = metrics::align(truth, pred);
        const auto scores = metrics::evaluate(corpus);

        out << std::fixed << std::setprecision(4);
        out << "Metric  Value\n";
        out << "GA      " << scores.ga << '\n';
        out << "PA      " << scores.pa << '\n';
        out << "FGA     " << scores.fga << '\n';
        out << "FTA     " << scores.fta << '\n';

        fs::create_directories(cmd.out_dir);
        auto f = open_output(cmd.out_dir / "metrics.json");
        json j{{"GA", scores.ga}, {"PA", scores.pa}, {"FGA", scores.fga}, {"FTA", scores.fta}, {"lines", corpus.size()}};
        f << j.dump(2) << '\n';
        return 0;
    } catch (const metrics::DomainMismatch& e) {
        err << "error: misaligned inputs: first offending LineId " << e.line_id() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_stats(const StatsCommand& cmd, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(cmd.stats);
        if (!in) throw Error("cannot read " + cmd.stats.string());
        const auto j = json::parse(in);
        const auto c = j.value("counters", json::object());
        auto get = [&](const char* key) { return c.value(key, std::uint64_t{0}); };
        const auto fwd = get("matched_bdpt_forward");
        const auto rev = get("matched_bdpt_reverse");
        const auto ptmp = get("matched_ptmp");
        const auto fresh = get("new_templates");
        const auto total = fwd + rev + ptmp + fresh;

        out << "lines parsed        " << total << '\n';
        out << "bdpt forward        " << fwd << " (" << percent(fwd, total) << ")\n";
        out << "bdpt reverse        " << rev << " (" << percent(rev, total) << ")\n";
        out << "ptmp                " << ptmp << " (" << percent(ptmp, total) << ")\n";
        out << "new templates       " << fresh << " (" << percent(fresh, total) << ")\n";
        out << "nlpe invocations    " << get("nlpe_invocations") << '\n';
        out << "llm calls           " << get("llm_calls") << '\n';
        out << "malformed replies   " << get("malformed_replies") << '\n';
        out << "stage2 unavailable  " << get("stage2_unavailable") << '\n';

        const auto usage = j.value("usage", json::object());
        out << "llm usage           " << usage.value("invocations", std::uint64_t{0}) << " invocations, "
            << usage.value("prompt_tokens", std::uint64_t{0}) << " prompt tokens, "
            << usage.value("completion_tokens", std::uint64_t{0}) << " completion tokens\n";

        for (const auto& b : j.value("pool", json::array())) {
            out << "bucket N=" << b.value("length", 0) << "  size " << b.value("size", 0) << "  updated "
                << b.value("updated", 0) << "  n:";
            const auto bins = b.value("match_count_histogram", json::object());
            for (const auto& [bin, count] : bins.items()) {
                out << ' ' << bin << '=' << count.get<std::uint64_t>();
            }
            out << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online log template parser with a bi-directional parse tree"};
    app.require_subcommand(1);

    ParseCommand parse;
    std::string backend = "mock";
    std::string format = "auto";
    std::string out_dir = ".";
    std::string input;
    std::string config;
    std::string fixtures;
    std::string lexicon;
    std::size_t top_k = 0;
    auto* p = app.add_subcommand("parse", "Parse a log file into templates");
    p->add_option("--input", input, "Plain-text log or Loghub structured CSV")->required();
    p->add_option("--out-dir", out_dir, "Output directory");
    p->add_option("--config", config, "JSON configuration file");
    p->add_option("--backend", backend, "LLM backend")->check(CLI::IsMember({"live", "mock"}));
    p->add_option("--fixtures", fixtures, "Directory of <prompt-digest>.txt replies for the mock backend");
    auto* top_k_opt = p->add_option("--top-k", top_k, "Pool candidates examined per log")->check(CLI::PositiveNumber);
    p->add_option("--lexicon", lexicon, "Alternate POS lexicon (word<TAB>TAG)");
    p->add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "text", "csv"}));
    p->add_flag("--disable-nlpe", parse.flags.disable_nlpe, "Similarity-only matching");
    p->add_flag("--disable-llm", parse.flags.disable_llm, "POS stage only");
    p->add_flag("--disable-pos", parse.flags.disable_pos, "LLM stage only");
    p->add_flag("--disable-ptmp", parse.flags.disable_ptmp, "No global pool fallback");
    p->add_flag("--disable-bdpt", parse.flags.disable_bdpt, "Route every log through the pool");

    EvaluateCommand eval;
    std::string pred_path;
    std::string truth_path;
    std::string eval_out = ".";
    auto* e = app.add_subcommand("evaluate", "Score predictions against ground truth");
    e->add_option("--predictions", pred_path, "Structured CSV from `parse`")->required();
    e->add_option("--truth", truth_path, "Ground-truth structured CSV")->required();
    e->add_option("--out-dir", eval_out, "Where metrics.json is written");

    std::string stats_path;
    auto* s = app.add_subcommand("stats", "Summarize a *_stats.json file");
    s->add_option("--input", stats_path, "Stats JSON written by `parse`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        return app.exit(ex, out, err);
    }

    if (p->parsed()) {
        parse.input = input;
        parse.out_dir = out_dir;
        if (!config.empty()) parse.config = config;
        if (!fixtures.empty()) parse.fixtures = fixtures;
        if (!lexicon.empty()) parse.lexicon = lexicon;
        if (top_k_opt->count() > 0) parse.top_k = top_k;
        parse.backend = backend == "live" ? Backend::live : Backend::mock;
        parse.format = format == "text" ? InputFormat::text : format == "csv" ? InputFormat::csv : InputFormat::automatic;
        return cmd_parse(parse, out, err);
    }
    if (e->parsed()) {
        eval.predictions = pred_path;
        eval.truth = truth_path;
        eval.out_dir = eval_out;
        return cmd_evaluate(eval, out, err);
    }
    return cmd_stats(StatsCommand{stats_path}, out, err);
}

}  // namespace bdparse::cli
