#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace ltesim {

using TimeMs = std::int64_t;

constexpr TimeMs kSecond = 1000;
constexpr TimeMs kMinute = 60 * kSecond;
constexpr TimeMs kHour = 60 * kMinute;
constexpr TimeMs kDay = 24 * kHour;

/// Thrown when a value violates the invariants of its type.
class InvalidValue : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An actor was driven outside its contract, e.g. paging a CONNECTED UE.
/// Always a simulator bug, never a scenario problem.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Radio access technology a cell belongs to, also used for the RAT a UE is camped on.
enum class Rat { lte, utran, gsm, none };

std::string_view to_string(Rat rat);
Rat rat_from_string(std::string_view text);

/// Flat-plane coordinates in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

/// Permanent subscriber identity: MCC (3) + MNC (2 or 3) + MSIN, 15 digits in total.
class Imsi {
 public:
  Imsi() = default;
  Imsi(std::string mcc, std::string mnc, std::string msin);

  /// Parses 15 contiguous digits; mnc_digits selects the MCC/MNC split.
  static Imsi from_digits(std::string_view digits, int mnc_digits = 2);
  /// Parses the "mcc-mnc-msin" form written by to_string().
  static Imsi parse(std::string_view text);

  const std::string& mcc() const { return mcc_; }
  const std::string& mnc() const { return mnc_; }
  const std::string& msin() const { return msin_; }

  std::string digits() const { return mcc_ + mnc_ + msin_; }
  std::string to_string() const { return mcc_ + "-" + mnc_ + "-" + msin_; }

  auto operator<=>(const Imsi&) const = default;

 private:
  std::string mcc_ = "001";
  std::string mnc_ = "01";
  std::string msin_ = "0000000000";
};

/// Temporary identity. Only the MME code and the 32-bit S-TMSI are kept; the
/// two names are used interchangeably throughout.
struct Guti {
  std::uint16_t mme_id = 0;
  std::uint32_t s_tmsi = 0;

  /// "0000002A@00A1"
  std::string to_string() const;
  static Guti parse(std::string_view text);

  auto operator<=>(const Guti&) const = default;
};

using MobileIdentity = std::variant<Imsi, Guti>;

struct CellIdentity {
  std::string mcc = "001";
  std::string mnc = "01";
  std::uint16_t tac = 0;
  std::uint32_t cell_id = 0;     // 28 bits
  std::uint32_t enodeb_id = 0;   // 20 bits
  double frequency_mhz = 0.0;
  int reselection_priority = 0;  // 0..7
  Rat rat = Rat::lte;

  void validate() const;

  /// Compact token: cellid,mcc,mnc,tac,enb,freq,prio,rat (ids in uppercase hex).
  std::string to_string() const;
  static CellIdentity parse(std::string_view text);

  bool operator==(const CellIdentity&) const = default;
};

std::string hex_string(std::uint64_t value, int width);
std::uint64_t parse_hex(std::string_view text, int max_digits);

}  // namespace ltesim
