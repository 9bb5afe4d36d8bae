#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drinfeld {

enum class errc {
  non_prime_characteristic,
  size_cap_exceeded,
  incompatible_degrees,
  field_mismatch,
  division_by_zero,
  precision_exhausted,
  residue_field_too_small,
  not_certified,
  inseparable_extension,
  inseparable,
  not_simple,
  slope_not_realized,
  depth_exceeded,
  degree_cap_exceeded,
  characteristic_mismatch,
  non_additive,
  non_positive_valuation,
  outside_open_stratum,
  rank_mismatch,
  not_a_root,
  ambiguous_identification,
  identity_failed,
  closure_cap_exceeded,
  cap_exceeded,
  not_single_tame_step,
  internal_soundness,
  overflow,
  invalid_argument,
  parse_error,
};

constexpr std::string_view to_string(errc e) noexcept {
  switch (e) {
    case errc::non_prime_characteristic: return "NonPrimeCharacteristic";
    case errc::size_cap_exceeded: return "SizeCapExceeded";
    case errc::incompatible_degrees: return "IncompatibleDegrees";
    case errc::field_mismatch: return "FieldMismatch";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::precision_exhausted: return "PrecisionExhausted";
    case errc::residue_field_too_small: return "ResidueFieldTooSmall";
    case errc::not_certified: return "NotCertified";
    case errc::inseparable_extension: return "InseparableExtension";
    case errc::inseparable: return "Inseparable";
    case errc::not_simple: return "NotSimple";
    case errc::slope_not_realized: return "SlopeNotRealized";
    case errc::depth_exceeded: return "DepthExceeded";
    case errc::degree_cap_exceeded: return "DegreeCapExceeded";
    case errc::characteristic_mismatch: return "CharacteristicMismatch";
    case errc::non_additive: return "NonAdditive";
    case errc::non_positive_valuation: return "NonPositiveValuation";
    case errc::outside_open_stratum: return "OutsideOpenStratum";
    case errc::rank_mismatch: return "RankMismatch";
    case errc::not_a_root: return "NotARoot";
    case errc::ambiguous_identification: return "AmbiguousIdentification";
    case errc::identity_failed: return "IdentityFailed";
    case errc::closure_cap_exceeded: return "ClosureCapExceeded";
    case errc::cap_exceeded: return "CapExceeded";
    case errc::not_single_tame_step: return "NotSingleTameStep";
    case errc::internal_soundness: return "InternalSoundnessError";
    case errc::overflow: return "Overflow";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  errc kind() const noexcept { return kind_; }

  /// Errors that a caller may cure by retrying with more precision.
  bool retryable() const noexcept {
    return kind_ == errc::precision_exhausted || kind_ == errc::ambiguous_identification;
  }

 private:
  errc kind_;
};

/// Raised when a residual polynomial does not split over the ambient field;
/// `degree` is the extension degree over the current ambient that would suffice.
class residue_field_too_small : public error {
 public:
  explicit residue_field_too_small(int degree)
      : error(errc::residue_field_too_small,
              "residual roots need an extension of degree " + std::to_string(degree)),
        degree_(degree) {}
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

}  // namespace drinfeld
