#include "cows/scenario.hpp"

#include <stdexcept>

#include "cows/parser.hpp"

namespace cows {

namespace {

// Keep this text in sync with corpus/tollbooth.cows (pinned by a test).
const char* const kTollboothSource =
    R"(// Tollbooth dynamic-adaptation model: an adaptation manager receives a
// create request carrying four time figures, checks the adaptation-time
// bound and then the overall execution-time bound, and either launches the
// adaptation or signals failure back to the requestor.

let

adaptManager(service) =
    * [X][Y][Z][XX][YY]
    service.create?<X,Y,Z,XX>.p.adaptime!<X,Y,Z,XX>
  | [X][Y][Z][XX]
    ser.checkOK?<X,Y,Z,XX>.q.exectime!<Z,XX>
  | ser.checkFail?<>. ser.launchFail!<repsvc>
  | ser.checkFail2?<>. ser.launchFail!<repsvc>

requestor() =
    serv.create!<0,4,10,60>
  | ser.checkOK2?<>.amadapt.launchOK!<> |
    (amadapt.launchOK?<>.s.signalOK!<>
    + ser.launchFail?<repsvc>.s.signalFail!<>
    + ser.launchFailx?<>.s.signalFail!<>)

Amcheck_gt_deadline(X) =
   (ser.checkFail!<>)

Amcheck_le_deadline(X,Y,Z,XX) =
   (ser.checkOK!<X,Y,Z,XX>)

Amcheck_gt_deadline2(X) =
    (ser.checkFail2!<>)
   | memory.assert?<X>.nil

Amcheck_le_deadline2(X) =
   (ser.checkOK2!<>)

amcheck() =
    [X][Y][Z][XX]
    p.adaptime?<X,Y,Z,XX>.
    [i#]
    (i.selectgreater!<X gt Y> |
      (i.selectgreater?<true>.
       Amcheck_gt_deadline(X) +
       i.selectgreater?<false>.
       Amcheck_le_deadline(X,Y,Z,XX)
      )
    )

amcheck2() =
    [X][Y]
    q.exectime?<X,Y>.
    [i#]
    [K]
    (i.selectgreater!<X gt Y> |
      (i.selectgreater?<true>.
       Amcheck_gt_deadline2(X) +
       i.selectgreater?<false>.
       Amcheck_le_deadline2(X)
      )
     )

in

adaptManager(serv)
| requestor()
| * amcheck()
| amcheck2()
| s.signalFail?<>.nil
| s.signalOK?<>.nil

end
)";

const char* const kCreateDefaults = "serv.create!<0,4,10,60>";

}  // namespace

std::string tollboothSource(const TollboothParams& p) {
  std::string src = kTollboothSource;
  std::string replacement = "serv.create!<" + std::to_string(p.adaptEstimate) + "," +
                            std::to_string(p.adaptDeadline) + "," +
                            std::to_string(p.execEstimate) + "," +
                            std::to_string(p.execBound) + ">";
  auto pos = src.find(kCreateDefaults);
  if (pos == std::string::npos)
    throw std::logic_error("tollbooth template lost its create invoke");
  src.replace(pos, std::string(kCreateDefaults).size(), replacement);
  return src;
}

Model buildTollbooth(const TollboothParams& p) { return parseModel(tollboothSource(p)); }

FormulaPtr responsivenessProp() {
  return parseFormula(
      "AG([serv.create<*>] AF(<s.signalOK<*>>true | <s.signalFail<*>>true))");
}

FormulaPtr availabilityProp() { return parseFormula("AG(enabled(serv.create))"); }

FormulaPtr reliabilityProp() {
  return parseFormula("AG([serv.create<*>] EF(<s.signalOK<*>>true))");
}

}  // namespace cows
