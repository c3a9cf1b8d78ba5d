SCHEDULES = {}
