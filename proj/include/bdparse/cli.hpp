#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bdparse/pipeline.hpp"

namespace bdparse::cli {

enum class Backend { mock, live };
enum class InputFormat { automatic, text, csv };

struct ParseCommand {
    std::filesystem::path input;
    std::filesystem::path out_dir = ".";
    std::optional<std::filesystem::path> config;
    Backend backend = Backend::mock;
    std::optional<std::filesystem::path> fixtures;
    std::optional<std::size_t> top_k;
    AblationFlags flags;
    std::optional<std::filesystem::path> lexicon;
    InputFormat format = InputFormat::automatic;
};

struct EvaluateCommand {
    std::filesystem::path predictions;
    std::filesystem::path truth;
    std::filesystem::path out_dir = ".";
};

struct StatsCommand {
    std::filesystem::path stats;
};

/// Messages from a plain-text file (one per line) or the Content column of a
/// structured CSV. `.csv` files are read as CSV unless the format is forced.
std::vector<std::string> read_messages(const std::filesystem::path& path, InputFormat format);

/// Writes `<stem>_structured.csv`, `<stem>_templates.csv` and `<stem>_stats.json`.
int cmd_parse(const ParseCommand& cmd, std::ostream& out, std::ostream& err);
/// Prints GA/PA/FGA/FTA and writes `metrics.json` to the output directory.
int cmd_evaluate(const EvaluateCommand& cmd, std::ostream& out, std::ostream& err);
/// Summarizes a stats file written by cmd_parse.
int cmd_stats(const StatsCommand& cmd, std::ostream& out, std::ostream& err);

/// Counter, usage and pool snapshot written next to the parse outputs.
nlohmann::json stats_json(const Parser& parser, const llm::UsageCounters& usage);

/// Argument parsing and dispatch for the `bdparse` executable.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bdparse::cli
