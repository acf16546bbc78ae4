/** Shared argument handling for the one-figure-per-script entry points. */
export function runPlot(
  usage: string,
  argCount: number,
  render: (args: string[]) => void,
): void {
  const args = process.argv.slice(2);
  if (args.length !== argCount) {
    console.error(`usage: ${usage}`);
    process.exit(2);
  }
  try {
    render(args);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}
