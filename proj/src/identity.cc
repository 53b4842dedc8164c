#include "ltesim/identity.h"

#include "ltesim/text.h"

#include <algorithm>
#include <cmath>

namespace ltesim {

namespace {

bool all_digits(std::string_view s)
{
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string_view to_string(Rat rat)
{
  switch (rat) {
    case Rat::lte:
      return "lte";
    case Rat::utran:
      return "utran";
    case Rat::gsm:
      return "gsm";
    case Rat::none:
      return "none";
  }
  return "none";
}

Rat rat_from_string(std::string_view text)
{
  if (text == "lte") return Rat::lte;
  if (text == "utran" || text == "3g") return Rat::utran;
  if (text == "gsm" || text == "2g") return Rat::gsm;
  if (text == "none") return Rat::none;
  throw InvalidValue("unknown RAT '" + std::string(text) + "'");
}

double distance(const Position& a, const Position& b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

Imsi::Imsi(std::string mcc, std::string mnc, std::string msin) :
  mcc_(std::move(mcc)), mnc_(std::move(mnc)), msin_(std::move(msin))
{
  if (mcc_.size() != 3 || !all_digits(mcc_)) {
    throw InvalidValue("IMSI: MCC must be 3 digits");
  }
  if (mnc_.size() < 2 || mnc_.size() > 3 || !all_digits(mnc_)) {
    throw InvalidValue("IMSI: MNC must be 2 or 3 digits");
  }
  if (!all_digits(msin_) || mcc_.size() + mnc_.size() + msin_.size() != 15) {
    throw InvalidValue("IMSI: MSIN must complete 15 digits");
  }
}

Imsi Imsi::from_digits(std::string_view digits, int mnc_digits)
{
  if (digits.size() != 15 || !all_digits(digits)) {
    throw InvalidValue("IMSI must be 15 digits: '" + std::string(digits) + "'");
  }
  if (mnc_digits != 2 && mnc_digits != 3) {
    throw InvalidValue("IMSI: MNC length must be 2 or 3");
  }
  auto n = static_cast<std::size_t>(mnc_digits);
  return Imsi(std::string(digits.substr(0, 3)), std::string(digits.substr(3, n)), std::string(digits.substr(3 + n)));
}

Imsi Imsi::parse(std::string_view text)
{
  auto parts = text::split(text, '-');
  if (parts.size() != 3) {
    throw InvalidValue("IMSI: expected mcc-mnc-msin, got '" + std::string(text) + "'");
  }
  return Imsi(std::string(parts[0]), std::string(parts[1]), std::string(parts[2]));
}

std::string hex_string(std::uint64_t value, int width)
{
  static const char* digits = "0123456789ABCDEF";
  std::string out(static_cast<std::size_t>(width), '0');
  for (int i = width - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::uint64_t parse_hex(std::string_view text, int max_digits)
{
  if (text.empty() || text.size() > static_cast<std::size_t>(max_digits)) {
    throw InvalidValue("bad hex field '" + std::string(text) + "'");
  }
  std::uint64_t v = 0;
  for (char c : text) {
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      throw InvalidValue("bad hex digit in '" + std::string(text) + "'");
    }
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

std::string Guti::to_string() const
{
  return hex_string(s_tmsi, 8) + "@" + hex_string(mme_id, 4);
}

Guti Guti::parse(std::string_view text)
{
  auto at = text.find('@');
  if (at == std::string_view::npos) {
    throw InvalidValue("GUTI: expected stmsi@mme, got '" + std::string(text) + "'");
  }
  Guti g;
  g.s_tmsi = static_cast<std::uint32_t>(parse_hex(text.substr(0, at), 8));
  g.mme_id = static_cast<std::uint16_t>(parse_hex(text.substr(at + 1), 4));
  return g;
}

void CellIdentity::validate() const
{
  if (mcc.size() != 3 || !all_digits(mcc)) {
    throw InvalidValue("cell: MCC must be 3 digits");
  }
  if (mnc.size() < 2 || mnc.size() > 3 || !all_digits(mnc)) {
    throw InvalidValue("cell: MNC must be 2 or 3 digits");
  }
  if (cell_id >= (1u << 28)) {
    throw InvalidValue("cell: cell_id exceeds 28 bits");
  }
  if (enodeb_id >= (1u << 20)) {
    throw InvalidValue("cell: enodeb_id exceeds 20 bits");
  }
  if (reselection_priority < 0 || reselection_priority > 7) {
    throw InvalidValue("cell: reselection priority outside [0,7]");
  }
  if (!std::isfinite(frequency_mhz) || frequency_mhz <= 0.0) {
    throw InvalidValue("cell: frequency must be positive");
  }
  if (rat == Rat::none) {
    throw InvalidValue("cell: RAT 'none' is not a cell technology");
  }
}

std::string CellIdentity::to_string() const
{
  std::string out = hex_string(cell_id, 7);
  // Trim leading zeros but keep one digit so short ids stay readable.
  auto nz = out.find_first_not_of('0');
  out = nz == std::string::npos ? "0" : out.substr(nz);
  out += "," + mcc + "," + mnc + ",";
  out += hex_string(tac, 4) + ",";
  out += hex_string(enodeb_id, 5) + ",";
  out += text::format_double(frequency_mhz) + ",";
  out += std::to_string(reselection_priority) + ",";
  out += std::string(ltesim::to_string(rat));
  return out;
}

CellIdentity CellIdentity::parse(std::string_view text)
{
  auto parts = text::split(text, ',');
  if (parts.size() != 8) {
    throw InvalidValue("cell: expected 8 comma-separated fields in '" + std::string(text) + "'");
  }
  CellIdentity c;
  c.cell_id = static_cast<std::uint32_t>(parse_hex(parts[0], 7));
  c.mcc = std::string(parts[1]);
  c.mnc = std::string(parts[2]);
  c.tac = static_cast<std::uint16_t>(parse_hex(parts[3], 4));
  c.enodeb_id = static_cast<std::uint32_t>(parse_hex(parts[4], 5));
  if (!text::parse_double(parts[5], c.frequency_mhz)) {
    throw InvalidValue("cell: bad frequency");
  }
  long long prio = 0;
  if (!text::parse_int(parts[6], prio)) {
    throw InvalidValue("cell: bad priority");
  }
  c.reselection_priority = static_cast<int>(prio);
  c.rat = rat_from_string(parts[7]);
  c.validate();
  return c;
}

}  // namespace ltesim
