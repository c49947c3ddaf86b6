#include "pcore/wcet.hpp"

#include <algorithm>

namespace pcore::wcet {

uint64_t effective_wcet(const WcetQuery& q) {
  if (q.tau_p == 0) throw std::invalid_argument("tau_p must be positive");
  if (q.tau_a0 == 0) throw std::invalid_argument("tau_a0 must be positive");
  if (q.ep < q.tau_p) throw std::invalid_argument("ep must be at least tau_p");
  uint64_t accesses = (q.tau_a0 + q.tau_p - 1) / q.tau_p;  // ceil
  uint64_t full = accesses - 1;
  return full * q.ep + (q.tau_a0 - full * q.tau_p);
}

MeasureResult measure_wcet(const Trace& trace, uint32_t marker_addr, int partition) {
  MeasureResult r;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::UartTx && e.addr == marker_addr &&
        (partition < 0 || e.partition == partition))
      r.marker_cycles.push_back(e.cycle);
  }
  if (r.marker_cycles.size() < 2)
    throw std::runtime_error("insufficient data: fewer than two progress markers in the trace");
  for (size_t i = 1; i < r.marker_cycles.size(); ++i)
    r.deltas.push_back(r.marker_cycles[i] - r.marker_cycles[i - 1]);
  r.max_delta = *std::max_element(r.deltas.begin(), r.deltas.end());
  r.min_delta = *std::min_element(r.deltas.begin(), r.deltas.end());
  return r;
}

double total_wcet(Arch arch, const ArchComparisonInput& in) {
  const double sum = in.tau_a + in.tau_b + in.tau_c;
  const double longest = std::max({in.tau_a, in.tau_b, in.tau_c});
  switch (arch) {
    case Arch::Proposed:
      return sum + 2 * in.delta_p;  // same for independent and chained tasks
    case Arch::SingleCoreEquivalent:
      return in.mode == DependencyMode::Independent ? longest : sum + 2 * in.delta_c;
    case Arch::FineGrained:
      return in.mode == DependencyMode::Independent ? 3 * longest : 3 * sum;
  }
  throw std::invalid_argument("unknown architecture");
}

double per_task_wcet(Arch arch, double tau_n) {
  return arch == Arch::FineGrained ? 3 * tau_n : tau_n;
}

}  // namespace pcore::wcet
