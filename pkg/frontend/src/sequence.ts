/** Monotonic sequence gate: responses for anything but the newest request
 * are discarded, so an out-of-order reply can never overwrite fresher state.
 */

export class SequenceGate {
  private issued = 0;

  /** Take the next sequence number before sending a request. */
  issue(): number {
    this.issued += 1;
    return this.issued;
  }

  /** True iff `seq` belongs to the newest issued request. */
  accept(seq: number): boolean {
    return seq === this.issued;
  }

  /** Sequence number of the newest issued request (0 before any). */
  newest(): number {
    return this.issued;
  }
}
