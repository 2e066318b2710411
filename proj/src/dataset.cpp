#include "froc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "froc/errors.hpp"

namespace froc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

[[noreturn]] void fail(const char* table, long line, const std::string& what) {
    throw DataError(std::string(table) + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

bool parse_int(std::string_view s, long& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

// Reads the header and iterates over non-blank data rows.
template <typename RowFn>
void read_table(std::istream& in, const char* table, std::string_view header, RowFn&& on_row) {
    std::string line;
    long lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = trim(line);
        if (lineno == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (view.empty()) continue;
        if (!saw_header) {
            if (view != header) fail(table, lineno, "expected header '" + std::string(header) + "'");
            saw_header = true;
            continue;
        }
        on_row(split_csv(view), lineno);
    }
    if (!saw_header) fail(table, lineno, "missing header '" + std::string(header) + "'");
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

}  // namespace

int PositiveSubject::detected_count() const {
    return static_cast<int>(std::count(detected.begin(), detected.end(), true));
}

long FrocDataset::total_lesions() const {
    long t = 0;
    for (const auto& s : positives) t += s.lesion_count;
    return t;
}

long FrocDataset::total_detected() const {
    long n = 0;
    for (const auto& s : positives) n += s.detected_count();
    return n;
}

long FrocDataset::total_fp_on_positives() const {
    long n = 0;
    for (const auto& s : positives) n += static_cast<long>(s.fp_scores.size());
    return n;
}

long FrocDataset::total_fp_on_negatives() const {
    long n = 0;
    for (const auto& s : negatives) n += static_cast<long>(s.fp_scores.size());
    return n;
}

std::vector<double> FrocDataset::all_tp_scores() const {
    std::vector<double> out;
    for (const auto& s : positives) out.insert(out.end(), s.tp_scores.begin(), s.tp_scores.end());
    return out;
}

std::vector<double> FrocDataset::fp_scores_on_negatives() const {
    std::vector<double> out;
    for (const auto& s : negatives) out.insert(out.end(), s.fp_scores.begin(), s.fp_scores.end());
    return out;
}

std::vector<double> FrocDataset::fp_scores_on_positives() const {
    std::vector<double> out;
    for (const auto& s : positives) out.insert(out.end(), s.fp_scores.begin(), s.fp_scores.end());
    return out;
}

FrocDataset parse_dataset(std::istream& subjects, std::istream& marks) {
    struct Slot {
        bool positive;
        std::size_t index;
    };
    FrocDataset ds;
    std::unordered_map<std::string, Slot> by_id;

    read_table(subjects, "subjects", "subject_id,status,n_lesions",
               [&](const std::vector<std::string_view>& f, long line) {
                   if (f.size() != 3) fail("subjects", line, "expected 3 fields, got " + std::to_string(f.size()));
                   std::string id(f[0]);
                   if (id.empty()) fail("subjects", line, "empty subject id");
                   if (by_id.count(id)) fail("subjects", line, "duplicate subject id '" + id + "'");
                   long n_lesions = 0;
                   if (!parse_int(f[2], n_lesions)) fail("subjects", line, "non-integer n_lesions '" + std::string(f[2]) + "'");
                   if (f[1] == "pos") {
                       if (n_lesions < 1) fail("subjects", line, "positive subject '" + id + "' needs n_lesions >= 1");
                       PositiveSubject s;
                       s.id = id;
                       s.lesion_count = static_cast<int>(n_lesions);
                       s.detected.assign(static_cast<std::size_t>(n_lesions), false);
                       by_id.emplace(id, Slot{true, ds.positives.size()});
                       ds.positives.push_back(std::move(s));
                   } else if (f[1] == "neg") {
                       if (n_lesions != 0) fail("subjects", line, "negative subject '" + id + "' must have n_lesions = 0");
                       by_id.emplace(id, Slot{false, ds.negatives.size()});
                       ds.negatives.push_back(NegativeSubject{id, {}});
                   } else {
                       fail("subjects", line, "status must be 'pos' or 'neg', got '" + std::string(f[1]) + "'");
                   }
               });

    // Best TP score per lesion; NaN marks "not detected".
    std::vector<std::vector<double>> best(ds.positives.size());
    for (std::size_t i = 0; i < ds.positives.size(); ++i)
        best[i].assign(static_cast<std::size_t>(ds.positives[i].lesion_count), std::numeric_limits<double>::quiet_NaN());

    read_table(marks, "marks", "subject_id,kind,lesion_index,score",
               [&](const std::vector<std::string_view>& f, long line) {
                   if (f.size() != 4) fail("marks", line, "expected 4 fields, got " + std::to_string(f.size()));
                   std::string id(f[0]);
                   auto it = by_id.find(id);
                   if (it == by_id.end()) fail("marks", line, "unknown subject id '" + id + "'");
                   double score = 0.0;
                   if (!parse_double(f[3], score)) fail("marks", line, "non-numeric score '" + std::string(f[3]) + "'");
                   if (!std::isfinite(score)) fail("marks", line, "score must be finite");
                   const Slot slot = it->second;
                   if (f[1] == "tp") {
                       if (!slot.positive) fail("marks", line, "TP mark on negative subject '" + id + "'");
                       long lesion = 0;
                       if (!parse_int(f[2], lesion)) fail("marks", line, "TP mark needs an integer lesion_index");
                       const auto& subj = ds.positives[slot.index];
                       if (lesion < 1 || lesion > subj.lesion_count)
                           fail("marks", line, "lesion_index " + std::to_string(lesion) + " outside 1.." +
                                                   std::to_string(subj.lesion_count));
                       double& b = best[slot.index][static_cast<std::size_t>(lesion - 1)];
                       if (std::isnan(b) || score > b) b = score;
                   } else if (f[1] == "fp") {
                       if (!f[2].empty()) fail("marks", line, "FP mark must leave lesion_index empty");
                       if (slot.positive)
                           ds.positives[slot.index].fp_scores.push_back(score);
                       else
                           ds.negatives[slot.index].fp_scores.push_back(score);
                   } else {
                       fail("marks", line, "kind must be 'tp' or 'fp', got '" + std::string(f[1]) + "'");
                   }
               });

    for (std::size_t i = 0; i < ds.positives.size(); ++i) {
        auto& subj = ds.positives[i];
        for (std::size_t s = 0; s < best[i].size(); ++s) {
            if (!std::isnan(best[i][s])) {
                subj.detected[s] = true;
                subj.tp_scores.push_back(best[i][s]);
            }
        }
    }
    return ds;
}

FrocDataset load_dataset(const std::string& subjects_path, const std::string& marks_path) {
    std::ifstream subjects(subjects_path);
    if (!subjects) throw DataError("cannot open subjects file '" + subjects_path + "'");
    std::ifstream marks(marks_path);
    if (!marks) throw DataError("cannot open marks file '" + marks_path + "'");
    return parse_dataset(subjects, marks);
}

void write_subjects_csv(const FrocDataset& ds, std::ostream& out) {
    out << "subject_id,status,n_lesions\n";
    for (const auto& s : ds.positives) out << s.id << ",pos," << s.lesion_count << '\n';
    for (const auto& s : ds.negatives) out << s.id << ",neg,0\n";
}

void write_marks_csv(const FrocDataset& ds, std::ostream& out) {
    out << "subject_id,kind,lesion_index,score\n";
    for (const auto& s : ds.positives) {
        std::size_t k = 0;
        for (std::size_t l = 0; l < s.detected.size(); ++l) {
            if (!s.detected[l]) continue;
            out << s.id << ",tp," << (l + 1) << ',' << format_double(s.tp_scores[k++]) << '\n';
        }
        for (double x : s.fp_scores) out << s.id << ",fp,," << format_double(x) << '\n';
    }
    for (const auto& s : ds.negatives)
        for (double x : s.fp_scores) out << s.id << ",fp,," << format_double(x) << '\n';
}

ValidationReport validate(const FrocDataset& ds) {
    ValidationReport report;
    auto& issues = report.issues;
    if (ds.positives.empty()) issues.emplace_back("no positive subjects");
    if (ds.negatives.empty()) issues.emplace_back("no negative subjects");

    auto all_finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    for (const auto& s : ds.positives) {
        if (s.lesion_count < 1) issues.push_back("positive subject '" + s.id + "' has no lesions");
        if (static_cast<int>(s.detected.size()) != s.lesion_count)
            issues.push_back("positive subject '" + s.id + "': detection vector length differs from lesion count");
        if (static_cast<int>(s.tp_scores.size()) != s.detected_count())
            issues.push_back("positive subject '" + s.id + "': TP score count differs from detected lesions");
        if (!all_finite(s.tp_scores) || !all_finite(s.fp_scores))
            issues.push_back("positive subject '" + s.id + "' has a non-finite score");
    }
    for (const auto& s : ds.negatives)
        if (!all_finite(s.fp_scores)) issues.push_back("negative subject '" + s.id + "' has a non-finite score");

    const long tp = ds.total_detected();
    if (!ds.positives.empty() && tp == 0)
        issues.emplace_back("no TP scores; G_theta1 unfittable");
    else if (tp == 1)
        issues.emplace_back("only one TP score; G_theta1 unfittable");
    const long fp = ds.total_fp_on_negatives();
    if (!ds.negatives.empty() && fp == 0)
        issues.emplace_back("no FP scores on negatives; F_theta2 unfittable");
    else if (fp == 1)
        issues.emplace_back("only one FP score on negatives; F_theta2 unfittable");
    return report;
}

SummaryStats summary_stats(const FrocDataset& ds) {
    SummaryStats st;
    st.num_positive = static_cast<long>(ds.positives.size());
    st.num_negative = static_cast<long>(ds.negatives.size());
    st.total_lesions = ds.total_lesions();
    st.total_tp_marks = ds.total_detected();
    st.total_fp_on_positives = ds.total_fp_on_positives();
    st.total_fp_on_negatives = ds.total_fp_on_negatives();
    if (st.num_positive > 0) {
        st.mean_lesions_per_positive = static_cast<double>(st.total_lesions) / st.num_positive;
        st.mean_fp_per_positive = static_cast<double>(st.total_fp_on_positives) / st.num_positive;
    }
    if (st.num_negative > 0) {
        st.mean_fp_per_negative = static_cast<double>(st.total_fp_on_negatives) / st.num_negative;
        const auto clean = std::count_if(ds.negatives.begin(), ds.negatives.end(),
                                         [](const NegativeSubject& s) { return s.fp_scores.empty(); });
        st.fraction_negatives_without_fp = static_cast<double>(clean) / st.num_negative;
    }
    return st;
}

MonotoneMap parse_monotone_map(const std::string& spec) {
    if (spec == "minmax") return MinMaxMap{};
    if (spec == "log") return LogMap{};
    if (spec.rfind("affine:", 0) == 0) {
        auto parts = split_csv(std::string_view(spec).substr(7));
        AffineMap m;
        if (parts.size() != 2 || !parse_double(parts[0], m.scale) || !parse_double(parts[1], m.shift))
            throw DataError("affine map must be written 'affine:a,b'");
        return m;
    }
    throw DataError("unknown rescale map '" + spec + "' (expected minmax, log or affine:a,b)");
}

FrocDataset rescale_scores(const FrocDataset& ds, const MonotoneMap& map) {
    double scale = 1.0, shift = 0.0;
    bool take_log = false;
    if (const auto* a = std::get_if<AffineMap>(&map)) {
        if (!(a->scale > 0.0) || !std::isfinite(a->shift))
            throw DataError("affine rescale needs scale a > 0 to be strictly increasing");
        scale = a->scale;
        shift = a->shift;
    } else if (std::holds_alternative<MinMaxMap>(map)) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        auto scan = [&](const std::vector<double>& v) {
            for (double x : v) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        };
        for (const auto& s : ds.positives) {
            scan(s.tp_scores);
            scan(s.fp_scores);
        }
        for (const auto& s : ds.negatives) scan(s.fp_scores);
        if (!(hi > lo)) throw DataError("min-max rescale needs at least two distinct scores");
        scale = 1.0 / (hi - lo);
        shift = -lo * scale;
    } else {
        take_log = true;
    }

    auto apply = [&](std::vector<double>& v) {
        for (double& x : v) {
            if (take_log) {
                if (!(x > 0.0)) throw DataError("log rescale applied to nonpositive score " + format_double(x));
                x = std::log(x);
            } else {
                x = x * scale + shift;
            }
        }
    };
    FrocDataset out = ds;
    for (auto& s : out.positives) {
        apply(s.tp_scores);
        apply(s.fp_scores);
    }
    for (auto& s : out.negatives) apply(s.fp_scores);
    if (std::holds_alternative<MinMaxMap>(map)) {
        // x*scale + shift can land a rounding step outside [0, 1].
        auto clamp = [](std::vector<double>& v) {
            for (double& x : v) x = std::clamp(x, 0.0, 1.0);
        };
        for (auto& s : out.positives) {
            clamp(s.tp_scores);
            clamp(s.fp_scores);
        }
        for (auto& s : out.negatives) clamp(s.fp_scores);
    }
    return out;
}

FrocDataset shrink_unit_boundary(const FrocDataset& ds) {
    long n = 0;
    bool boundary = false;
    auto scan = [&](const std::vector<double>& v) {
        for (double x : v) {
            ++n;
            boundary = boundary || x == 0.0 || x == 1.0;
        }
    };
    for (const auto& s : ds.positives) {
        scan(s.tp_scores);
        scan(s.fp_scores);
    }
    for (const auto& s : ds.negatives) scan(s.fp_scores);
    if (!boundary) return ds;
    const double nd = static_cast<double>(n);
    return rescale_scores(ds, AffineMap{(nd - 1.0) / nd, 0.5 / nd});
}

}  // namespace froc
