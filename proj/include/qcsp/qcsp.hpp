#pragma once

#include "qcsp/algebra.hpp"
#include "qcsp/cli.hpp"
#include "qcsp/gallery.hpp"
#include "qcsp/io.hpp"
#include "qcsp/model.hpp"
#include "qcsp/reduction.hpp"
#include "qcsp/semantics.hpp"
