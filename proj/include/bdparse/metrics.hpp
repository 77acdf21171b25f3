#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bdparse/errors.hpp"

namespace bdparse::metrics {

/// Truth and prediction for each line, aligned by position.
struct LabeledCorpus {
    std::vector<std::uint64_t> line_ids;
    std::vector<std::string> truth;
    std::vector<std::string> pred;

    std::size_t size() const { return line_ids.size(); }
};

class DomainMismatch : public Error {
public:
    explicit DomainMismatch(std::uint64_t line_id)
        : Error("line id " + std::to_string(line_id) + " is present in only one of prediction and truth"),
          line_id_(line_id) {}
    std::uint64_t line_id() const { return line_id_; }

private:
    std::uint64_t line_id_;
};

/// Trims and collapses runs of whitespace to one space.
std::string normalize_template(std::string_view text);

/// Joins the two maps on line id (templates are normalized).
/// Throws DomainMismatch naming the smallest line id found in only one map.
LabeledCorpus align(const std::map<std::uint64_t, std::string>& truth,
                    const std::map<std::uint64_t, std::string>& pred);

/// Fraction of lines whose predicted group equals their true group.
double grouping_accuracy(const LabeledCorpus& corpus);
/// Fraction of lines whose predicted template equals the true template.
double parsing_accuracy(const LabeledCorpus& corpus);
/// F1 over templates whose group is exactly right.
double f1_grouping_accuracy(const LabeledCorpus& corpus);
/// F1 over templates whose group and text are exactly right.
double f1_template_accuracy(const LabeledCorpus& corpus);

struct Scores {
    double ga = 0.0;
    double pa = 0.0;
    double fga = 0.0;
    double fta = 0.0;
};

Scores evaluate(const LabeledCorpus& corpus);

}  // namespace bdparse::metrics
