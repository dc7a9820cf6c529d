#ifndef GLR_GLR_HPP
#define GLR_GLR_HPP

#include "glr/core.hpp"
#include "glr/graph.hpp"
#include "glr/io.hpp"
#include "glr/metrics.hpp"
#include "glr/normals.hpp"
#include "glr/parallel.hpp"
#include "glr/patch_distance.hpp"
#include "glr/solver.hpp"
#include "glr/sparse.hpp"
#include "glr/spatial.hpp"
#include "glr/types.hpp"

#endif // GLR_GLR_HPP
