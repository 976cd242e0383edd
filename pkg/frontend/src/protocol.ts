/**
 * Wire protocol schemas, mirroring the server's validation rules.
 *
 * Every outbound message is validated before send; inbound messages are
 * parsed defensively so one malformed frame cannot take the viewer down.
 */
import { z } from "zod";

const finite = z.number().finite();
const vec3 = z.array(finite).length(3);
const quat = z.array(finite).length(4);

export const JointSchema = z.object({
  name: z.string().min(1),
  parent: z.number().int(),
  offset: vec3,
});

export const HelloSchema = z.object({
  type: z.literal("hello"),
  fps: finite.positive(),
  styles: z.array(z.string().min(1)).nonempty(),
  skeleton: z.object({ joints: z.array(JointSchema).nonempty() }),
});

export const FrameSchema = z.object({
  type: z.literal("frame"),
  t: z.number().int().nonnegative(),
  root: z.object({ pos: vec3, quat }),
  joints: z.object({
    pos: z.array(vec3),
    quat: z.array(quat),
  }),
  experts: z.array(z.array(finite).nonempty()).nonempty(),
  lambda: finite,
  overrun_count: z.number().int().nonnegative(),
});

export const ErrorSchema = z.object({
  type: z.literal("error"),
  code: z.string(),
  message: z.string(),
});

export const ServerMessageSchema = z.discriminatedUnion("type", [
  HelloSchema,
  FrameSchema,
  ErrorSchema,
]);

export const GAITS = ["stand", "walk", "run"] as const;

export const ControlSchema = z.object({
  type: z.literal("control"),
  dir: z.array(finite).length(2),
  speed: finite.nonnegative(),
  gait: z.enum(GAITS),
});

export const SetStyleSchema = z.object({
  type: z.literal("set_style"),
  weights: z
    .array(finite.nonnegative())
    .min(1)
    .refine((w) => w.some((v) => v > 0), {
      message: "weights must not all be zero",
    }),
  duration_s: finite.positive(),
});

export const ResetSchema = z.object({
  type: z.literal("reset"),
  seed: z.number().int(),
});

export const ClientMessageSchema = z.discriminatedUnion("type", [
  ControlSchema,
  SetStyleSchema,
  ResetSchema,
]);

export type Hello = z.infer<typeof HelloSchema>;
export type Frame = z.infer<typeof FrameSchema>;
export type ServerMessage = z.infer<typeof ServerMessageSchema>;
export type ClientMessage = z.infer<typeof ClientMessageSchema>;
export type Gait = (typeof GAITS)[number];

export type ParseResult =
  | { ok: true; msg: ServerMessage }
  | { ok: false; error: string };

/** Parse one server message; never throws. */
export function parseServer(text: string): ParseResult {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return { ok: false, error: "not valid JSON" };
  }
  const result = ServerMessageSchema.safeParse(data);
  if (!result.success) {
    const issue = result.error.issues[0];
    const where = issue && issue.path.length ? issue.path.join(".") + ": " : "";
    return { ok: false, error: where + (issue ? issue.message : "invalid") };
  }
  return { ok: true, msg: result.data };
}

/** Validate and serialize an outbound message. Throws on schema violation. */
export function encodeClient(msg: ClientMessage): string {
  return JSON.stringify(ClientMessageSchema.parse(msg));
}
