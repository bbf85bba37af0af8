#include "cpe/kernels.hpp"

#include <omp.h>

namespace cpe::kernels {

CVector correlate(const CMatrix& atoms, const CVector& y) {
    const Index cols = atoms.cols();
    CVector out(cols);
#pragma omp parallel for schedule(static)
    for (Index p = 0; p < cols; ++p) {
        out(p) = atoms.col(p).dot(y);
    }
    return out;
}

CVector correlate_serial(const CMatrix& atoms, const CVector& y) {
    CVector out(atoms.cols());
    for (Index p = 0; p < atoms.cols(); ++p) out(p) = atoms.col(p).dot(y);
    return out;
}

RVector coherence_row(const CMatrix& atoms, Index k) {
    const Index cols = atoms.cols();
    RVector out(cols);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < cols; ++i) {
        out(i) = std::abs(atoms.col(k).dot(atoms.col(i)));
    }
    return out;
}

RVector coherence_row_serial(const CMatrix& atoms, Index k) {
    RVector out(atoms.cols());
    for (Index i = 0; i < atoms.cols(); ++i) out(i) = std::abs(atoms.col(k).dot(atoms.col(i)));
    return out;
}

CMatrix sample_atoms(const SignalModel& model, const RVector& params) {
    CMatrix atoms(model.grid.n, params.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (Index p = 0; p < params.size(); ++p) {
        atoms.col(p) = model.atom(params(p));
    }
    return atoms;
}

CMatrix sample_atoms_serial(const SignalModel& model, const RVector& params) {
    CMatrix atoms(model.grid.n, params.size());
    for (Index p = 0; p < params.size(); ++p) atoms.col(p) = model.atom(params(p));
    return atoms;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace cpe::kernels
