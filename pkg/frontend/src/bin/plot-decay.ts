import { renderDecay } from "../plots.js";
import { runPlot } from "./common.js";

runPlot("plot-decay <norms.csv> <output.svg>", 2, (args) =>
  renderDecay(args[0]!, args[1]!),
);
