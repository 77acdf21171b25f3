#include "bdparse/metrics.hpp"

#include <cctype>
#include <unordered_map>

namespace bdparse::metrics {

namespace {

struct GroupTally {
    std::size_t pred_groups = 0;
    std::size_t truth_groups = 0;
    std::size_t correct_groups = 0;
    std::size_t correct_templates = 0;
    std::size_t correctly_grouped_lines = 0;
};

// Groups lines by predicted template and checks each group against the
// truth partition.
GroupTally tally(const LabeledCorpus& corpus) {
    if (corpus.size() == 0) throw PreconditionError("metrics need a non-empty corpus");
    if (corpus.truth.size() != corpus.size() || corpus.pred.size() != corpus.size()) {
        throw PreconditionError("corpus columns have different lengths");
    }

    std::unordered_map<std::string_view, std::size_t> truth_size;
    for (const auto& t : corpus.truth) ++truth_size[t];

    struct PredGroup {
        std::size_t size = 0;
        std::string_view truth;
        bool uniform = true;
    };
    std::unordered_map<std::string_view, PredGroup> groups;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto [it, inserted] = groups.try_emplace(corpus.pred[i]);
        auto& g = it->second;
        if (inserted) {
            g.truth = corpus.truth[i];
        } else if (g.truth != corpus.truth[i]) {
            g.uniform = false;
        }
        ++g.size;
    }

    GroupTally out;
    out.pred_groups = groups.size();
    out.truth_groups = truth_size.size();
    for (const auto& [pred, g] : groups) {
        if (!g.uniform || truth_size.at(g.truth) != g.size) continue;
        ++out.correct_groups;
        out.correctly_grouped_lines += g.size;
        if (pred == g.truth) ++out.correct_templates;
    }
    return out;
}

double f1(std::size_t correct, std::size_t predicted, std::size_t actual) {
    if (correct == 0) return 0.0;
    const double p = static_cast<double>(correct) / static_cast<double>(predicted);
    const double r = static_cast<double>(correct) / static_cast<double>(actual);
    return 2.0 * p * r / (p + r);
}

}  // namespace

std::string normalize_template(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

LabeledCorpus align(const std::map<std::uint64_t, std::string>& truth,
                    const std::map<std::uint64_t, std::string>& pred) {
    auto t = truth.begin();
    auto p = pred.begin();
    LabeledCorpus out;
    while (t != truth.end() || p != pred.end()) {
        if (p == pred.end() || (t != truth.end() && t->first < p->first)) throw DomainMismatch(t->first);
        if (t == truth.end() || p->first < t->first) throw DomainMismatch(p->first);
        out.line_ids.push_back(t->first);
        out.truth.push_back(normalize_template(t->second));
        out.pred.push_back(normalize_template(p->second));
        ++t;
        ++p;
    }
    return out;
}

double grouping_accuracy(const LabeledCorpus& corpus) {
    return static_cast<double>(tally(corpus).correctly_grouped_lines) / static_cast<double>(corpus.size());
}

double parsing_accuracy(const LabeledCorpus& corpus) {
    if (corpus.size() == 0) throw PreconditionError("metrics need a non-empty corpus");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) correct += corpus.pred[i] == corpus.truth[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

double f1_grouping_accuracy(const LabeledCorpus& corpus) {
    const auto t = tally(corpus);
    return f1(t.correct_groups, t.pred_groups, t.truth_groups);
}

double f1_template_accuracy(const LabeledCorpus& corpus) {
    const auto t = tally(corpus);
    return f1(t.correct_templates, t.pred_groups, t.truth_groups);
}

Scores evaluate(const LabeledCorpus& corpus) {
    const auto t = tally(corpus);
    Scores s;
    s.ga = static_cast<double>(t.correctly_grouped_lines) / static_cast<double>(corpus.size());
    s.pa = parsing_accuracy(corpus);
    s.fga = f1(t.correct_groups, t.pred_groups, t.truth_groups);
    s.fta = f1(t.correct_templates, t.pred_groups, t.truth_groups);
    return s;
}

}  // namespace bdparse::metrics
