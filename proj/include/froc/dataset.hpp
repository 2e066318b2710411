#pragma once

// Free-response (FROC) observer data: subjects, lesions and scored marks.
//
// Marks arrive pre-adjudicated as true positive (matched to a lesion) or
// false positive. A positive subject carries t_i >= 1 lesions; each lesion is
// either detected (and then has exactly one TP score) or missed. Negative
// subjects carry only FP marks.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace froc {

struct PositiveSubject {
    std::string id;
    int lesion_count = 1;
    std::vector<bool> detected;      // one flag per lesion
    std::vector<double> tp_scores;   // one entry per detected lesion, lesion order
    std::vector<double> fp_scores;

    int detected_count() const;
    bool operator==(const PositiveSubject&) const = default;
};

struct NegativeSubject {
    std::string id;
    std::vector<double> fp_scores;

    bool operator==(const NegativeSubject&) const = default;
};

struct FrocDataset {
    std::vector<PositiveSubject> positives;
    std::vector<NegativeSubject> negatives;

    std::size_t num_positive() const { return positives.size(); }
    std::size_t num_negative() const { return negatives.size(); }
    long total_lesions() const;            // T
    long total_detected() const;           // sum of L_is
    long total_fp_on_positives() const;    // sum of n_i
    long total_fp_on_negatives() const;    // sum of m_j

    std::vector<double> all_tp_scores() const;
    std::vector<double> fp_scores_on_negatives() const;
    std::vector<double> fp_scores_on_positives() const;

    bool operator==(const FrocDataset&) const = default;
};

// Parses the subjects table (`subject_id,status,n_lesions`) and the marks
// table (`subject_id,kind,lesion_index,score`). Several TP marks on one
// lesion collapse to the maximum score. Throws DataError with a
// "<table>:<line>: ..." diagnostic on the first violation.
FrocDataset parse_dataset(std::istream& subjects, std::istream& marks);
FrocDataset load_dataset(const std::string& subjects_path, const std::string& marks_path);

// Writes the two tables in the format parse_dataset reads back.
void write_subjects_csv(const FrocDataset& ds, std::ostream& out);
void write_marks_csv(const FrocDataset& ds, std::ostream& out);

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

// Empty report iff the dataset satisfies every structural invariant and has
// enough marks to fit the model (K1 >= 1, K2 >= 1, >= 2 TP scores, >= 2 FP
// scores on negatives).
ValidationReport validate(const FrocDataset& ds);

struct SummaryStats {
    long num_positive = 0;
    long num_negative = 0;
    long total_lesions = 0;
    long total_tp_marks = 0;
    long total_fp_on_positives = 0;
    long total_fp_on_negatives = 0;
    std::optional<double> mean_lesions_per_positive;
    std::optional<double> mean_fp_per_positive;
    std::optional<double> mean_fp_per_negative;
    std::optional<double> fraction_negatives_without_fp;
};

SummaryStats summary_stats(const FrocDataset& ds);

// Strictly increasing score maps.
struct AffineMap {
    double scale = 1.0;
    double shift = 0.0;
};
struct MinMaxMap {};  // observed [min, max] over all scores -> [0, 1]
struct LogMap {};     // natural log, scores must be positive

using MonotoneMap = std::variant<AffineMap, MinMaxMap, LogMap>;

// Parses "minmax", "log" or "affine:a,b".
MonotoneMap parse_monotone_map(const std::string& spec);

// Applies the same map to every TP and FP score; counts are untouched.
FrocDataset rescale_scores(const FrocDataset& ds, const MonotoneMap& map);

// When any score sits exactly at 0 or 1, maps every score through
// x -> (x (n - 1) + 0.5) / n with n the total number of scores, so Beta fits
// see the open interval. A common increasing map leaves all indices unchanged.
// Returns the dataset untouched otherwise.
FrocDataset shrink_unit_boundary(const FrocDataset& ds);

}  // namespace froc
