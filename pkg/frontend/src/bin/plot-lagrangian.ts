import { renderLagrangian } from "../plots.js";
import { runPlot } from "./common.js";

runPlot("plot-lagrangian <output.svg>", 1, (args) =>
  renderLagrangian(args[0]!),
);
