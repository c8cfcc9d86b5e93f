#pragma once

#include "backend.hpp"
#include "error.hpp"
#include "fem.hpp"
#include "functionspace.hpp"
#include "io.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "solver.hpp"
#include "sparse.hpp"
#include "study.hpp"
#include "tensor.hpp"
