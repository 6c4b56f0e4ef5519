/** One-click constraint templates for the textarea. */

export interface ConstraintTemplate {
  label: string;
  text: string;
}

export const CONSTRAINT_TEMPLATES: ConstraintTemplate[] = [
  {
    label: "No driving after bike/transit",
    text: "(mode=bike | mode=public) AFTER G(!(mode=car))",
  },
  {
    label: "Bike 20-30 minutes",
    text: "F(time(bike) >= 1200) & G(time(bike) <= 1800)",
  },
  {
    label: "Avoid flagged areas (crime > 15)",
    text: "G(aux_here(crime) <= 15)",
  },
];
