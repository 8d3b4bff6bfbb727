#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vecon {

/// Failure categories surfaced by the library. Each maps 1:1 onto a named
/// error condition of the module contracts; the CLI turns any of them into
/// exit code 1.
enum class errc {
    invalid_value,
    malformed_document,
    empty_series,
    non_positive_price,
    duplicate_day,
    non_positive_volume,
    duplicate_item,
    source_unavailable,
    missing_fixture,
    insufficient_coverage,
    no_overlap,
    malformed_snapshot_file,
    schema_version_mismatch,
    non_positive_value,
    series_too_short,
    k_out_of_range,
    too_few_items,
    empty_membership,
    unknown_member,
    zero_end_value,
    rank_deficient,
    too_few_observations,
    degenerate_series,
    no_points,
    non_finite_coordinate,
    negative_sigma,
    io_failure,
    empty_snapshot,
    invalid_config,
};

constexpr std::string_view errc_name(errc c) {
    switch (c) {
        case errc::invalid_value: return "InvalidValue";
        case errc::malformed_document: return "MalformedDocument";
        case errc::empty_series: return "EmptySeries";
        case errc::non_positive_price: return "NonPositivePrice";
        case errc::duplicate_day: return "DuplicateDay";
        case errc::non_positive_volume: return "NonPositiveVolume";
        case errc::duplicate_item: return "DuplicateItem";
        case errc::source_unavailable: return "SourceUnavailable";
        case errc::missing_fixture: return "MissingFixture";
        case errc::insufficient_coverage: return "InsufficientCoverage";
        case errc::no_overlap: return "NoOverlap";
        case errc::malformed_snapshot_file: return "MalformedSnapshotFile";
        case errc::schema_version_mismatch: return "SchemaVersionMismatch";
        case errc::non_positive_value: return "NonPositiveValue";
        case errc::series_too_short: return "SeriesTooShort";
        case errc::k_out_of_range: return "KOutOfRange";
        case errc::too_few_items: return "TooFewItems";
        case errc::empty_membership: return "EmptyMembership";
        case errc::unknown_member: return "UnknownMember";
        case errc::zero_end_value: return "ZeroEndValue";
        case errc::rank_deficient: return "RankDeficient";
        case errc::too_few_observations: return "TooFewObservations";
        case errc::degenerate_series: return "DegenerateSeries";
        case errc::no_points: return "NoPoints";
        case errc::non_finite_coordinate: return "NonFiniteCoordinate";
        case errc::negative_sigma: return "NegativeSigma";
        case errc::io_failure: return "IoFailure";
        case errc::empty_snapshot: return "EmptySnapshot";
        case errc::invalid_config: return "InvalidConfig";
    }
    return "UnknownError";
}

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
          code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& detail) {
    throw error(code, detail);
}

inline void require(bool ok, errc code, const std::string& detail) {
    if (!ok) fail(code, detail);
}

}  // namespace vecon
