#pragma once

#include "ltesim/topology.h"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <variant>
#include <vector>

namespace ltesim::core {

struct Sticky {
  bool operator==(const Sticky&) const = default;
};
struct FreshOnTau {
  bool operator==(const FreshOnTau&) const = default;
};
struct Periodic {
  TimeMs interval_ms = kDay;
  bool operator==(const Periodic&) const = default;
};
struct SequentialOnPowerCycle {
  bool operator==(const SequentialOnPowerCycle&) const = default;
};

using GutiPolicy = std::variant<Sticky, FreshOnTau, Periodic, SequentialOnPowerCycle>;

std::string_view policy_name(const GutiPolicy& policy);

enum class GutiEvent { attach, tau, periodic_tick, power_cycle };

/// Live S-TMSI values of one MME code. Allocation never hands out a value
/// that is still live, background subscribers included.
class GutiPool {
 public:
  GutiPool(std::uint16_t mme_id, radio::Rng rng) : mme_id_(mme_id), rng_(rng) {}

  std::uint16_t mme_id() const { return mme_id_; }
  bool live(std::uint32_t s_tmsi) const { return live_.count(s_tmsi) != 0; }
  std::size_t size() const { return live_.size(); }

  void reserve(Guti guti);
  void release(Guti guti);
  /// Uniform over unused values; the result is reserved.
  Guti draw_fresh();

 private:
  std::uint16_t mme_id_;
  radio::Rng rng_;
  std::unordered_set<std::uint32_t> live_;
};

/// GUTI to use after event. The result is live in the pool; the caller
/// releases old once it stops being used.
///
///   policy                  attach     tau        periodic_tick  power_cycle
///   Sticky                  keep       keep       keep           keep
///   FreshOnTau              fresh      fresh      keep           fresh
///   Periodic                keep       keep       fresh          fresh
///   SequentialOnPowerCycle  keep       keep       keep           one nibble
///
/// "keep" draws fresh when there is no old value.
Guti allocate_guti(const GutiPolicy& policy, std::optional<Guti> old, GutiEvent event, GutiPool& pool);

enum class PagingStrategy { smart, ta_wide };

enum class Service { volte, ip_push, sms };
std::string_view to_string(Service service);

struct MmeConfig {
  std::uint16_t mme_id = 0x00A1;
  GutiPolicy policy = Sticky{};
  PagingStrategy paging = PagingStrategy::smart;
  TimeMs t3413_ms = 6 * kSecond;
  bool echo_network_capabilities = false;
  /// Off-time after which a re-attach counts as a power cycle.
  TimeMs power_cycle_threshold_ms = kDay;
};

struct Subscription {
  Imsi imsi;
  /// Empty means every TA of the network.
  std::set<std::uint16_t> allowed_tacs;
};

struct MmeContext {
  Imsi imsi;
  std::set<std::uint16_t> allowed_tacs;
  std::optional<Guti> guti;
  std::optional<CellIdentity> last_seen_cell;
  bool emm_registered = false;
  bool ecm_connected = false;
  UeCapabilities capabilities;
  bool security_context = false;
  TimeMs detached_at_ms = -1;
  bool guti_reallocation_due = false;
};

/// S1 association of one UE connection, chosen by the RAN side.
using LinkId = std::size_t;

struct PagingEmission {
  CellIdentity cell;
  RrcPaging paging;
};

struct PageDispatch {
  std::vector<PagingEmission> emissions;
  std::optional<TimeMs> timeout_at_ms;
  std::uint64_t page_id = 0;
};

struct TerminatingOutcome {
  enum class Kind { paged, deliver_now, rejected, unreachable };
  Kind kind = Kind::unreachable;
  PageDispatch dispatch;
  EmmCause cause;
};

struct MmeReply {
  std::vector<NasBody> downlink;
  /// Services whose pages this uplink answered, oldest first.
  std::vector<Service> deliver;
};

using AttachOutcome = std::variant<AttachAccept, AttachReject, IdentityRequest>;
using TauOutcome = std::variant<TauAccept, TauReject, IdentityRequest>;

class Mme {
 public:
  Mme(MmeConfig config, const CellTopology& topology, radio::Rng rng);

  void provision(Subscription sub);

  const MmeConfig& config() const { return config_; }
  GutiPool& pool() { return pool_; }
  const MmeContext* context(const Imsi& imsi) const;
  const MmeContext* context_by_guti(const Guti& guti) const;
  bool voice_capable(const Imsi& imsi) const;
  const std::map<Imsi, MmeContext>& contexts() const { return contexts_; }

  /// Routes one uplink NAS message. cell is the legitimate cell it arrived through.
  MmeReply handle_uplink(LinkId link, const NasBody& msg, const CellIdentity& cell, TimeMs now);

  AttachOutcome process_attach(LinkId link, const AttachRequest& req, const CellIdentity& cell, TimeMs now);
  TauOutcome process_tau(LinkId link, const TauRequest& req, const CellIdentity& cell, TimeMs now);

  /// First paging attempt. Throws ContractViolation for a CONNECTED or
  /// never-seen UE.
  PageDispatch page_ue(const Imsi& imsi, Service service, TimeMs now);
  /// T3413 expiry of page_id: TA-wide retry after a single-cell attempt,
  /// otherwise the page is abandoned.
  PageDispatch on_paging_timeout(const Imsi& imsi, std::uint64_t page_id, TimeMs now);

  /// Network-side arrival of a call, push or SMS for imsi.
  TerminatingOutcome terminate(const Imsi& imsi, Service service, TimeMs now);

  void on_connection_released(LinkId link);
  /// Marks every context for reallocation at its next TAU or service request.
  void periodic_tick();
  /// Drops the GUTI of imsi, so the next page carries the IMSI.
  void purge_guti(const Imsi& imsi);

 private:
  struct PendingAttach {
    Imsi imsi;
    AttachRequest request;
    Guti guti;
    CellIdentity cell;
  };
  struct PendingPage {
    std::deque<Service> services;
    bool ta_wide_sent = false;
    std::uint64_t page_id = 0;
  };
  using AwaitingIdentity = std::variant<AttachRequest, TauRequest>;

  MmeContext* find(const Imsi& imsi);
  MmeContext* find_by_guti(const Guti& guti);
  void associate(LinkId link, MmeContext& ctx, const CellIdentity& cell);
  bool tac_allowed(const MmeContext& ctx, std::uint16_t tac) const;
  void set_guti(MmeContext& ctx, Guti guti);
  AttachOutcome attach_known(LinkId link, MmeContext& ctx, const AttachRequest& req, const CellIdentity& cell,
                             TimeMs now);
  TauOutcome tau_known(MmeContext& ctx, const CellIdentity& cell);
  std::vector<CellIdentity> paging_cells(const MmeContext& ctx, Service service, bool ta_wide) const;
  PagingEmission emission(const MmeContext& ctx, const CellIdentity& cell) const;
  std::vector<Service> take_pending(const Imsi& imsi);

  MmeConfig config_;
  const CellTopology& topology_;
  GutiPool pool_;
  std::map<Imsi, MmeContext> contexts_;
  std::map<Guti, Imsi> by_guti_;
  std::map<LinkId, Imsi> links_;
  std::map<LinkId, PendingAttach> pending_attach_;
  std::map<LinkId, AwaitingIdentity> awaiting_identity_;
  std::map<Imsi, PendingPage> pages_;
  std::uint64_t next_page_id_ = 1;
};

}  // namespace ltesim::core
