#pragma once

#include "phimod/canonical.hpp"
#include "phimod/errors.hpp"
#include "phimod/field.hpp"
#include "phimod/grassman.hpp"
#include "phimod/isom.hpp"
#include "phimod/job.hpp"
#include "phimod/linalg.hpp"
#include "phimod/literal.hpp"
#include "phimod/matrix.hpp"
#include "phimod/phimodule.hpp"
#include "phimod/report.hpp"
#include "phimod/series.hpp"
#include "phimod/tree.hpp"
