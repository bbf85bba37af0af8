#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a plain serial twin that is
// kept as the reference implementation for tests and for bench/.

#include "cpe/signal.hpp"
#include "cpe/types.hpp"

namespace cpe::kernels {

/// out(p) = <y, atoms(:, p)> = atoms(:, p)^H y, one column per thread chunk.
CVector correlate(const CMatrix& atoms, const CVector& y);
CVector correlate_serial(const CMatrix& atoms, const CVector& y);

/// out(i) = |<atoms(:, i), atoms(:, k)>|
RVector coherence_row(const CMatrix& atoms, Index k);
RVector coherence_row_serial(const CMatrix& atoms, Index k);

/// Column p holds model.atom(params(p)).
CMatrix sample_atoms(const SignalModel& model, const RVector& params);
CMatrix sample_atoms_serial(const SignalModel& model, const RVector& params);

int max_threads();

}  // namespace cpe::kernels
