import math

from hypnav.sim.state import HumanState, RobotState


class Agent(object):
    """
    Mutable disc agent moving holonomically in the plane
    """

    def __init__(self, radius, v_pref):
        self.radius = radius
        self.v_pref = v_pref
        self.px = self.py = 0.0
        self.vx = self.vy = 0.0
        self.gx = self.gy = 0.0

    def set(self, px, py, gx, gy, vx=0.0, vy=0.0):
        self.px, self.py = px, py
        self.gx, self.gy = gx, gy
        self.vx, self.vy = vx, vy

    @property
    def position(self):
        return self.px, self.py

    @property
    def velocity(self):
        return self.vx, self.vy

    def goal_distance(self):
        return math.hypot(self.gx - self.px, self.gy - self.py)

    def reached_goal(self):
        return self.goal_distance() < self.radius

    def move(self, vx, vy, time_step):
        self.vx, self.vy = vx, vy
        self.px += vx * time_step
        self.py += vy * time_step


class Human(Agent):
    def state(self):
        return HumanState(self.px, self.py, self.vx, self.vy, self.radius)


class Robot(Agent):
    def __init__(self, radius, v_pref):
        super().__init__(radius, v_pref)
        self.theta = math.pi / 2

    def state(self):
        return RobotState(self.px, self.py, self.vx, self.vy, self.radius,
                          self.gx, self.gy, self.v_pref, self.theta)
