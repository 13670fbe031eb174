#pragma once

#include "momsos/certificate.hpp"
#include "momsos/cli.hpp"
#include "momsos/conditioning.hpp"
#include "momsos/error.hpp"
#include "momsos/geometry.hpp"
#include "momsos/measures.hpp"
#include "momsos/moment_sdp.hpp"
#include "momsos/polynomial.hpp"
#include "momsos/pop.hpp"
#include "momsos/rational.hpp"
#include "momsos/sdp_solver.hpp"
