#pragma once

#include <functional>

namespace plap {

/// Worker count used by element loops (energies, indicators). Default 1.
void set_num_threads(int n);
int num_threads();

/// Sum of term(i) for i in [0, n). The range is cut into num_threads()
/// contiguous chunks whose partial sums are added in chunk order, so the
/// result depends only on n and the thread count.
double parallel_sum(int n, const std::function<double(int)>& term);

/// Calls body(i) for every i in [0, n), chunked like parallel_sum.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace plap
